"""Apolarity pairing, catalecticant matrices, apolar kernels, and the
polar-polyhedron certificate.

Forms in the dual variables reuse :class:`HomogeneousForm`; which side of
the pairing an argument lives on is noted per function.  With plain monomial
coefficients the pairing carries explicit factorial factors:

    D_{xi^b}(x^a) = (a! / (a-b)!) x^(a-b)   when b <= a, else 0.

All functions are pure over immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PreconditionError
from .linalg import kernel_basis, numerical_rank
from .forms import (
    HomogeneousForm,
    exponent_matrix,
    monomial_basis,
    monomial_index,
    num_monomials,
    projective_separation,
    DISTINCT_TOL,
)

# Largest allowed residual when testing the inclusion L_d(points) within the
# apolar space of F.
INCLUSION_TOL = 1e-8


def _falling_factor(alpha, beta) -> int:
    # prod_j (alpha_j + beta_j)! / alpha_j!
    out = 1
    for a, b in zip(alpha, beta):
        out *= math.factorial(a + b) // math.factorial(a)
    return out


def apolar_pairing(phi: HomogeneousForm, F: HomogeneousForm) -> HomogeneousForm:
    """Apply phi(d_0, ..., d_n) to F; phi lives in the dual variables.

    The result has degree d - t.  Implemented directly from the derivative
    rule so it stays an independent code path from :func:`catalecticant`.
    """
    if phi.num_vars != F.num_vars:
        raise PreconditionError("phi and F must have the same number of variables")
    t, d = phi.degree, F.degree
    if t > d:
        raise PreconditionError(f"cannot apply degree {t} operator to degree {d} form")
    n = F.n
    out = np.zeros(num_monomials(n, d - t), dtype=complex)
    cols = monomial_basis(n, t)
    for g, gamma in enumerate(monomial_basis(n, d - t)):
        acc = 0.0 + 0.0j
        for b, beta in enumerate(cols):
            if phi.coeffs[b] == 0.0:
                continue
            top = tuple(x + y for x, y in zip(gamma, beta))
            acc += phi.coeffs[b] * _falling_factor(gamma, beta) * F.coeffs[
                monomial_index(n, d, top)
            ]
        out[g] = acc
    return HomogeneousForm(F.num_vars, d - t, out)


@dataclass(frozen=True, eq=False)
class CatalecticantMatrix:
    """Matrix of the linear map phi -> D_phi(F) in the fixed monomial bases.

    Rows are indexed by monomial_basis(n, d-t), columns by
    monomial_basis(n, t); entry (a, b) is ((a+b)!/a!) f_{a+b}.
    """

    t: int
    d: int
    num_vars: int
    entries: np.ndarray

    @property
    def row_exponents(self):
        return monomial_basis(self.num_vars - 1, self.d - self.t)

    @property
    def col_exponents(self):
        return monomial_basis(self.num_vars - 1, self.t)


@lru_cache(maxsize=None)
def _catalecticant_tables(n: int, d: int, t: int):
    rows = monomial_basis(n, d - t)
    cols = monomial_basis(n, t)
    idx = np.empty((len(rows), len(cols)), dtype=np.int64)
    fac = np.empty((len(rows), len(cols)), dtype=float)
    for r, alpha in enumerate(rows):
        for c, beta in enumerate(cols):
            top = tuple(x + y for x, y in zip(alpha, beta))
            idx[r, c] = monomial_index(n, d, top)
            fac[r, c] = _falling_factor(alpha, beta)
    idx.flags.writeable = False
    fac.flags.writeable = False
    return idx, fac


def catalecticant(F: HomogeneousForm, t: int) -> CatalecticantMatrix:
    """Catalecticant of F in source degree t.

    Satisfies entries @ coeffs(phi) = coeffs(D_phi(F)) for every phi of
    degree t.
    """
    if not 1 <= t <= F.degree:
        raise PreconditionError("need 1 <= t <= degree")
    idx, fac = _catalecticant_tables(F.n, F.degree, t)
    return CatalecticantMatrix(t, F.degree, F.num_vars, fac * F.coeffs[idx])


@dataclass(frozen=True, eq=False)
class ApolarBasis:
    """Orthonormal basis of the degree-t apolar space of a form.

    Basis elements are forms in the dual variables; their coefficient
    vectors are orthonormal columns of the kernel of the catalecticant.
    """

    t: int
    num_vars: int
    basis: tuple

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> np.ndarray:
        """Coefficient vectors stacked as orthonormal columns."""
        if not self.basis:
            return np.zeros((num_monomials(self.num_vars - 1, self.t), 0),
                            dtype=complex)
        return np.column_stack([phi.coeffs for phi in self.basis])


def apolar_space(F: HomogeneousForm, t: int, rank_rtol=None) -> ApolarBasis:
    """Orthonormal basis of the kernel of the degree-t catalecticant of F."""
    cat = catalecticant(F, t)
    ker = kernel_basis(cat.entries, rank_rtol)
    basis = tuple(
        HomogeneousForm(F.num_vars, t, ker[:, k]) for k in range(ker.shape[1])
    )
    return ApolarBasis(t, F.num_vars, basis)


def _point_coords(p) -> np.ndarray:
    coords = getattr(p, "coords", p)
    return np.asarray(coords, dtype=complex).ravel()


def vanishing_forms(points, t: int, rank_rtol=None) -> list[HomogeneousForm]:
    """Orthonormal basis of degree-t forms vanishing at the given points.

    The evaluation matrix has one row per point (points are scaled to unit
    norm first for conditioning); the kernel has dimension at least
    C(n+t, t) - len(points).
    """
    if t < 1:
        raise PreconditionError("vanishing_forms needs t >= 1")
    pts = [_point_coords(p) for p in points]
    if not pts:
        raise PreconditionError("need at least one point")
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if projective_separation(pts[i], pts[j]) <= DISTINCT_TOL:
                raise PreconditionError(f"points {i} and {j} coincide projectively")
    n = pts[0].size - 1
    e = exponent_matrix(n, t)
    rows = []
    for p in pts:
        if p.size != n + 1:
            raise PreconditionError("points live in different spaces")
        p = p / np.linalg.norm(p)
        rows.append(np.prod(p[None, :] ** e, axis=1))
    ker = kernel_basis(np.stack(rows), rank_rtol)
    num_vars = n + 1
    return [HomogeneousForm(num_vars, t, ker[:, k]) for k in range(ker.shape[1])]


@dataclass(frozen=True)
class PolyhedronCertificate:
    """Outcome of the polar-polyhedron test with its numerical margins.

    verdict is true iff the vanishing forms of the points are contained in
    the apolar space of F (inclusion_defect <= tolerance) and the inclusion
    breaks after deleting any single point.  When minimality fails,
    minimality_witness is the index of a deletable point.  deletion_defects
    reports the margin for every deletion so borderline configurations can
    be judged by the caller.
    """

    verdict: bool
    inclusion_defect: float
    minimality_witness: int | None
    deletion_defects: tuple


def is_polar_polyhedron(F: HomogeneousForm, points,
                        inclusion_tol: float | None = None,
                        rank_rtol=None) -> PolyhedronCertificate:
    """Test whether the given points form a polar polyhedron of F.

    points are linear forms (or projective points of the dual space).  The
    inclusion defect is the largest residual of a vanishing-form basis
    vector after orthogonal projection onto the apolar basis.
    """
    tol = INCLUSION_TOL if inclusion_tol is None else inclusion_tol
    coords = [_point_coords(p) for p in points]
    if not coords:
        raise PreconditionError("empty point list")
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            if projective_separation(coords[i], coords[j]) <= DISTINCT_TOL:
                raise PreconditionError(f"points {i} and {j} coincide projectively")

    apolar = apolar_space(F, F.degree, rank_rtol).matrix

    def defect(subset) -> float:
        if subset:
            forms = vanishing_forms(subset, F.degree, rank_rtol)
            if not forms:
                return 0.0
            v = np.column_stack([phi.coeffs for phi in forms])
        else:
            # no points left: the vanishing space is everything
            v = np.eye(num_monomials(F.n, F.degree), dtype=complex)
        resid = v - apolar @ (apolar.conj().T @ v)
        return float(np.linalg.norm(resid, axis=0).max())

    inclusion_defect = defect(coords)
    deletion_defects = []
    witness = None
    for i in range(len(coords)):
        deletion_defects.append(defect(coords[:i] + coords[i + 1:]))
        if witness is None and deletion_defects[i] <= tol:
            witness = i

    verdict = inclusion_defect <= tol and witness is None
    return PolyhedronCertificate(verdict, inclusion_defect, witness,
                                 tuple(deletion_defects))


def catalecticant_rank(F: HomogeneousForm, t: int, rank_rtol=None) -> int:
    """Numerical rank of the degree-t catalecticant of F."""
    return numerical_rank(catalecticant(F, t).entries, rank_rtol)
