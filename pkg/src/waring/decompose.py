"""Constructive decomposition algorithms and parameter-space samplers.

Four families have explicit constructions: binary forms (apolar root
extraction), quadrics of full rank (pencil diagonalization plus the
unirational sampler above the minimal rank), plane conics with four terms,
and plane cubics with four terms.  Chain moves glue decompositions that
share a term, and the tangent dimension of the sum map measures the local
dimension of the space of decompositions.

Samplers either return an accepted sample (residual below tolerance, forms
pairwise distinct, weights nonzero) or raise RejectedSampleError with a
diagnostic; preconditions on the inputs raise PreconditionError instead.
All randomness enters through explicit seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, RejectedSampleError
from .linalg import RANK_RTOL, kernel_basis, numerical_rank, span_frames
from .apolarity import apolar_space
from .forms import (
    DISTINCT_TOL,
    Decomposition,
    HomogeneousForm,
    LinearForm,
    ProjectivePoint,
    complex_gaussian,
    decompositions_close,
    make_decomposition,
    monomial_basis,
    multiply_by_variable,
    num_monomials,
    partial_derivative,
    power_form,
    projective_separation,
    synthesize,
    terms_close,
    canonical_term,
    _multinomial_vector,
)

# Largest accepted relative residual ||F - synth(dec)|| / ||F||.
RESIDUAL_TOL = 1e-8
# Leading coefficients below this (relative) drop the degree of a binary
# form, putting a root at infinity.
DEGREE_DROP_TOL = 1e-10
# Samplers hitting degenerate parameters resample this many times.
RETRY_BUDGET = 16


@dataclass(frozen=True, eq=False)
class VspSample:
    """One point of the space of decompositions with its parameter preimage."""

    parameter: np.ndarray | None
    decomposition: Decomposition
    residual: float


@dataclass(frozen=True, eq=False)
class PencilResult:
    """Simultaneous diagonalization data of a pencil of two quadrics."""

    eigenvalues: np.ndarray
    vertices: tuple
    decomposition: Decomposition
    residual: float


@dataclass(frozen=True, eq=False)
class ChainCertificate:
    """A sequence of decompositions of one form where consecutive entries
    share a term; links[k] = (i, j) says term i of sequence[k] equals term j
    of sequence[k+1] after canonicalization."""

    sequence: tuple
    links: tuple


def decomposition_residual(F: HomogeneousForm, dec: Decomposition) -> float:
    """Relative coefficient-vector residual of F minus the synthesized sum."""
    diff = F - synthesize(dec, F.n)
    scale = F.norm()
    return diff.norm() / scale if scale > 0 else diff.norm()


def solve_weights(F: HomogeneousForm, forms, rank_rtol=None):
    """Least-squares weights w with sum w_i L_i^d closest to F.

    Returns (weights, relative residual).  A numerically rank-deficient
    power system (dependent L_i^d) is rejected.  The system is solved with
    unit-normalized power columns so wildly different |L_i| stay well
    conditioned.
    """
    forms = list(forms)
    if not forms:
        raise PreconditionError("need at least one linear form")
    cols = np.column_stack([power_form(L, F.degree).coeffs for L in forms])
    norms = np.linalg.norm(cols, axis=0)
    unit = cols / norms
    if numerical_rank(unit, rank_rtol) < len(forms):
        raise RejectedSampleError("the powers L_i^d are numerically dependent")
    y, *_ = np.linalg.lstsq(unit, F.coeffs, rcond=None)
    w = y / norms
    scale = F.norm()
    resid = float(np.linalg.norm(cols @ w - F.coeffs))
    return w, (resid / scale if scale > 0 else resid)


def _accept_sample(F, forms, parameter, residual_tol, distinct_tol, rank_rtol):
    """Shared accept/reject path for every sampler."""
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            if projective_separation(forms[i].coords, forms[j].coords) <= distinct_tol:
                raise RejectedSampleError(
                    f"sampled linear forms {i} and {j} coincide"
                )
    weights, resid = solve_weights(F, forms, rank_rtol)
    if resid > residual_tol:
        raise RejectedSampleError(f"residual {resid:.3e} above tolerance")
    try:
        dec = make_decomposition(F.degree, weights, forms,
                                 rank_rtol=rank_rtol, distinct_tol=distinct_tol)
    except PreconditionError as exc:
        raise RejectedSampleError(str(exc)) from exc
    if parameter is not None:
        parameter = np.asarray(parameter, dtype=complex)
    return VspSample(parameter, dec, resid)


# ---------------------------------------------------------------------------
# binary forms
# ---------------------------------------------------------------------------


def binary_form_roots(coeffs, drop_tol: float = DEGREE_DROP_TOL):
    """Projective roots of a binary form sum_k c_k u^(m-k) v^k.

    Dehomogenizes at u = 1 and takes companion-matrix eigenvalues
    (numpy.roots); every leading coefficient below drop_tol times the
    largest magnitude drops the degree and contributes the root [0, 1].
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    scale = float(np.abs(c).max())
    if scale == 0.0:
        raise ValueError("the zero form has no well-defined roots")
    m = c.size - 1
    k = m
    while k > 0 and abs(c[k]) <= drop_tol * scale:
        k -= 1
    roots = [np.array([0.0, 1.0], dtype=complex) for _ in range(m - k)]
    if k > 0:
        for t in np.roots(c[k::-1]):
            roots.append(np.array([1.0, t], dtype=complex))
    return roots


def sylvester_parametrize(F: HomogeneousForm, h: int, u,
                          residual_tol: float = RESIDUAL_TOL,
                          distinct_tol: float = DISTINCT_TOL,
                          rank_rtol=None) -> VspSample:
    """Decompose a general binary form from a point of the parameter space.

    For h <= d <= 2h-1 the apolar space in degree h has dimension 2h-d;
    u selects an apolar form phi whose h projective roots are the linear
    forms of the decomposition.  Repeated roots (u on the discriminant) are
    rejected, not averaged.
    """
    if F.n != 1:
        raise PreconditionError("sylvester_parametrize handles binary forms only")
    d = F.degree
    if h < 1 or not h <= d <= 2 * h - 1:
        raise PreconditionError(f"need h <= d <= 2h-1, got d={d}, h={h}")
    basis = apolar_space(F, h, rank_rtol)
    if basis.dimension != 2 * h - d:
        raise PreconditionError(
            f"form is not general: apolar space in degree {h} has dimension "
            f"{basis.dimension}, expected {2 * h - d}"
        )
    u = np.asarray(u, dtype=complex).ravel()
    if u.size != basis.dimension:
        raise PreconditionError(
            f"parameter must have {basis.dimension} coordinates, got {u.size}"
        )
    if not np.abs(u).max() > 0:
        raise PreconditionError("parameter must be a projective point")
    phi = basis.matrix @ u
    try:
        roots = binary_form_roots(phi)
    except ValueError as exc:
        raise RejectedSampleError(str(exc)) from exc
    forms = [LinearForm(r) for r in roots]
    return _accept_sample(F, forms, u, residual_tol, distinct_tol, rank_rtol)


# ---------------------------------------------------------------------------
# quadrics
# ---------------------------------------------------------------------------


def quadric_matrix(F: HomogeneousForm) -> np.ndarray:
    """Symmetric matrix M with F(x) = x^T M x."""
    if F.degree != 2:
        raise PreconditionError("quadric_matrix needs a degree-2 form")
    m = F.num_vars
    M = np.zeros((m, m), dtype=complex)
    for idx, alpha in enumerate(monomial_basis(F.n, 2)):
        slots = [k for k, a in enumerate(alpha) for _ in range(a)]
        i, j = slots
        if i == j:
            M[i, i] = F.coeffs[idx]
        else:
            M[i, j] = M[j, i] = F.coeffs[idx] / 2.0
    return M


def quadric_pencil_decompose(F: HomogeneousForm, G: HomogeneousForm,
                             residual_tol: float = RESIDUAL_TOL,
                             distinct_tol: float = DISTINCT_TOL,
                             rank_rtol=None) -> PencilResult:
    """Decompose a nondegenerate quadric via the pencil it spans with G.

    The eigenvalues of inv(M_F) M_G locate the n+1 singular cones of the
    pencil; the eigenvectors are the cone vertices and the rows of the
    inverse eigenvector matrix are the linear forms.  A repeated eigenvalue
    (G not general in the pencil) is rejected.
    """
    rtol = RANK_RTOL if rank_rtol is None else rank_rtol
    MF = quadric_matrix(F)
    MG = quadric_matrix(G)
    if MF.shape != MG.shape:
        raise PreconditionError("F and G must have the same number of variables")
    s = np.linalg.svd(MF, compute_uv=False)
    if s[-1] <= rtol * s[0]:
        raise PreconditionError("quadric F is numerically singular")
    mu, V = np.linalg.eig(np.linalg.solve(MF, MG))
    scale = float(np.abs(mu).max())
    if scale == 0.0:
        raise RejectedSampleError("pencil is degenerate: all eigenvalues vanish")
    m = mu.size
    for i in range(m):
        for j in range(i + 1, m):
            if abs(mu[i] - mu[j]) <= distinct_tol * scale:
                raise RejectedSampleError(
                    f"pencil eigenvalues {i} and {j} coincide"
                )
    rows = np.linalg.inv(V)
    forms = [LinearForm(rows[i]) for i in range(m)]
    sample = _accept_sample(F, forms, None, residual_tol, distinct_tol, rank_rtol)
    eigenvalues = np.asarray(mu, dtype=complex)
    vertices = tuple(ProjectivePoint(V[:, i]) for i in range(m))
    return PencilResult(eigenvalues, vertices, sample.decomposition, sample.residual)


def quadric_sample_vsp(F: HomogeneousForm, h: int, extra_terms, G: HomogeneousForm,
                       residual_tol: float = RESIDUAL_TOL,
                       distinct_tol: float = DISTINCT_TOL,
                       rank_rtol=None) -> VspSample:
    """Sample an h-term decomposition of a quadric for h above the rank.

    The h - (n+1) extra terms are subtracted from F and the remaining
    quadric is decomposed through the pencil with G; the union of both term
    lists is the sample.  Collisions between an extra term and a pencil
    term are rejected.
    """
    if F.degree != 2:
        raise PreconditionError("quadric_sample_vsp needs a degree-2 form")
    n = F.n
    if h <= n + 1:
        raise PreconditionError("need h > n+1; use quadric_pencil_decompose at h = n+1")
    if h > num_monomials(n, 2):
        raise PreconditionError(
            f"h = {h} squares in {n + 1} variables can never be independent"
        )
    extras = [(complex(w), L) for w, L in extra_terms]
    if len(extras) != h - (n + 1):
        raise PreconditionError(
            f"need {h - (n + 1)} extra terms for h = {h}, got {len(extras)}"
        )
    remainder = F
    for w, L in extras:
        remainder = remainder - w * power_form(L, 2)
    pencil = quadric_pencil_decompose(remainder, G, residual_tol,
                                      distinct_tol, rank_rtol)
    weights = [w for w, _ in extras] + [w for w, _ in pencil.decomposition.terms]
    forms = [L for _, L in extras] + pencil.decomposition.forms
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            if projective_separation(forms[i].coords, forms[j].coords) <= distinct_tol:
                raise RejectedSampleError("an extra term collides with a pencil term")
    try:
        dec = make_decomposition(2, weights, forms, rank_rtol=rank_rtol,
                                 distinct_tol=distinct_tol)
    except PreconditionError as exc:
        raise RejectedSampleError(str(exc)) from exc
    resid = decomposition_residual(F, dec)
    if resid > residual_tol:
        raise RejectedSampleError(f"residual {resid:.3e} above tolerance")
    return VspSample(np.asarray(G.coeffs, dtype=complex), dec, resid)


# ---------------------------------------------------------------------------
# conic-conic intersection (shared by the conic and plane-cubic samplers)
# ---------------------------------------------------------------------------


def _permute_conic(M: np.ndarray, order) -> np.ndarray:
    idx = np.asarray(order)
    return M[np.ix_(idx, idx)]


def _newton_refine(point, M1, M2, steps: int = 16):
    """Damped Newton iteration for a common zero of two conic forms."""
    x = np.array(point, dtype=complex)
    chart = int(np.argmax(np.abs(x)))
    free = [i for i in range(3) if i != chart]

    def residual(y):
        return np.array([y @ (M1 @ y), y @ (M2 @ y)], dtype=complex)

    r = residual(x)
    for _ in range(steps):
        if np.linalg.norm(r) == 0.0:
            break
        jac = np.array([
            (2.0 * (M1 @ x))[free],
            (2.0 * (M2 @ x))[free],
        ])
        try:
            delta = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            break
        step = 1.0
        improved = False
        for _ in range(8):
            cand = x.copy()
            cand[free] -= step * delta
            rc = residual(cand)
            if np.linalg.norm(rc) < np.linalg.norm(r):
                x, r = cand, rc
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return x


def _binary_eval(coeffs, s, t):
    # coeffs[k] multiplies first^(m-k) second^k
    m = len(coeffs) - 1
    return sum(c * s ** (m - k) * t ** k for k, c in enumerate(coeffs))


def _intersect_eliminating(c1, c2, M1, M2, elim,
                           residual_tol, distinct_tol):
    """One hidden-variable elimination attempt; None means try another chart."""
    order = [elim] + [i for i in range(3) if i != elim]
    P1 = _permute_conic(M1, order)
    P2 = _permute_conic(M2, order)
    # quadratic in y0: A y0^2 + B(y1,y2) y0 + C(y1,y2)
    A1, A2 = P1[0, 0], P2[0, 0]
    B1 = np.array([2.0 * P1[0, 1], 2.0 * P1[0, 2]])
    B2 = np.array([2.0 * P2[0, 1], 2.0 * P2[0, 2]])
    C1 = np.array([P1[1, 1], 2.0 * P1[1, 2], P1[2, 2]])
    C2 = np.array([P2[1, 1], 2.0 * P2[1, 2], P2[2, 2]])
    s1 = float(np.abs(P1).max())
    s2 = float(np.abs(P2).max())
    if abs(A1) <= 1e-10 * s1 or abs(A2) <= 1e-10 * s2:
        return None
    # resultant of the two quadratics: (A1 C2 - A2 C1)^2 - (A1 B2 - A2 B1)(B1 C2 - B2 C1)
    ac = A1 * C2 - A2 * C1
    ab = A1 * B2 - A2 * B1
    bc = np.convolve(B1, C2) - np.convolve(B2, C1)
    res = np.convolve(ac, ac) - np.convolve(ab, bc)
    if np.abs(res).max() <= 1e-10 * (s1 * s2) ** 2:
        return None
    try:
        roots = binary_form_roots(res)
    except ValueError:
        return None
    points = []
    for s, t in roots:
        den = -_binary_eval(ab, s, t)      # A2 B1 - A1 B2 evaluated at (s, t)
        num = _binary_eval(ac, s, t)       # A1 C2 - A2 C1
        b1v = _binary_eval(B1, s, t)
        b2v = _binary_eval(B2, s, t)
        den_scale = max(abs(A1) * abs(b2v), abs(A2) * abs(b1v), 1e-300)
        if abs(den) > 1e-8 * den_scale:
            y0 = num / den
        else:
            # the linear elimination degenerates; fall back to matching the
            # roots of the first quadratic against the second conic
            cands = np.roots([A1, b1v, _binary_eval(C1, s, t)])
            if cands.size == 0:
                return None
            vals = []
            for y0c in cands:
                y = np.array([y0c, s, t], dtype=complex)
                vals.append(abs(y @ (P2 @ y)))
            y0 = cands[int(np.argmin(vals))]
        y = np.array([y0, s, t], dtype=complex)
        x = np.empty(3, dtype=complex)
        x[order] = y
        x = _newton_refine(x, M1, M2)
        nrm = float(np.linalg.norm(x))
        if nrm == 0.0:
            return None
        for M, sc in ((M1, float(np.abs(M1).max())), (M2, float(np.abs(M2).max()))):
            if abs(x @ (M @ x)) > residual_tol * sc * nrm ** 2:
                return None
        points.append(x)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if projective_separation(points[i], points[j]) <= distinct_tol:
                return None
    return [ProjectivePoint(p) for p in points]


def conic_intersection(q1: HomogeneousForm, q2: HomogeneousForm,
                       residual_tol: float = RESIDUAL_TOL,
                       distinct_tol: float = DISTINCT_TOL):
    """Four simple intersection points of two plane conics.

    Hidden-variable resultant: eliminate one variable to a binary quartic,
    solve by companion matrix, back-substitute through the linear-in-the-
    eliminated-variable combination, then refine with damped Newton steps on
    the original pair.  Configurations with fewer than four simple common
    zeros are rejected.
    """
    for q in (q1, q2):
        if q.n != 2 or q.degree != 2:
            raise PreconditionError("conic_intersection needs two plane conics")
    M1 = quadric_matrix(q1)
    M2 = quadric_matrix(q2)
    for elim in range(3):
        points = _intersect_eliminating(q1, q2, M1, M2, elim,
                                        residual_tol, distinct_tol)
        if points is not None:
            return points
    raise RejectedSampleError(
        "conic intersection is not transverse (fewer than 4 simple solutions)"
    )


# ---------------------------------------------------------------------------
# plane conics, h = 4
# ---------------------------------------------------------------------------


def _pullback_conic(functional: np.ndarray) -> HomogeneousForm:
    # hyperplane {sum_a c_a z_a = 0} meets the Veronese surface where
    # sum_a c_a multinomial(2; a) L^a = 0, a conic in the dual plane
    return HomogeneousForm(3, 2, functional * _multinomial_vector(2, 2))


def conic_vsp4_sample(F: HomogeneousForm, plane,
                      residual_tol: float = RESIDUAL_TOL,
                      distinct_tol: float = DISTINCT_TOL,
                      rank_rtol=None) -> VspSample:
    """Four-term decomposition of a plane conic cut out by a 3-plane.

    The 3-plane through [F] is given by two hyperplane functionals (a 2 x 6
    array); each pulls back through the Veronese map to a conic on the dual
    plane, and the four common zeros are the linear forms.
    """
    if F.n != 2 or F.degree != 2:
        raise PreconditionError("conic_vsp4_sample needs a plane conic")
    plane = np.asarray(plane, dtype=complex)
    if plane.shape != (2, 6):
        raise PreconditionError("plane must be two hyperplane functionals (2 x 6)")
    scale = F.norm()
    for k, functional in enumerate(plane):
        pairing = abs(functional @ F.coeffs)
        if pairing > residual_tol * np.linalg.norm(functional) * scale:
            raise PreconditionError(f"hyperplane {k} does not pass through [F]")
    points = conic_intersection(_pullback_conic(plane[0]), _pullback_conic(plane[1]),
                                residual_tol, distinct_tol)
    forms = [LinearForm(p.coords) for p in points]
    return _accept_sample(F, forms, plane, residual_tol, distinct_tol, rank_rtol)


def conic_plane_from_forms(forms) -> np.ndarray:
    """The two hyperplane functionals cutting the span of four squares."""
    forms = list(forms)
    if len(forms) != 4:
        raise PreconditionError("need exactly four linear forms")
    span = np.column_stack([power_form(L, 2).coeffs for L in forms])
    ker = kernel_basis(span.T)
    if ker.shape[1] != 2:
        raise PreconditionError("the four squares do not span a 3-plane")
    return ker.T


def random_conic_plane(F: HomogeneousForm, seed: int) -> np.ndarray:
    """A seeded random 3-plane through [F], as two hyperplane functionals."""
    if F.n != 2 or F.degree != 2:
        raise PreconditionError("random_conic_plane needs a plane conic")
    rng = np.random.default_rng(seed)
    through = kernel_basis(F.coeffs[None, :])   # functionals vanishing on [F]
    return (through @ complex_gaussian(rng, (through.shape[1], 2))).T


# ---------------------------------------------------------------------------
# plane cubics, h = 4
# ---------------------------------------------------------------------------


def _derivative_frame(F: HomogeneousForm, rank_rtol=None):
    """Orthonormal frames (span, complement) of the three first partials."""
    partials = np.column_stack(
        [partial_derivative(F, i).coeffs for i in range(3)]
    )
    basis, complement = span_frames(partials, rank_rtol)
    if basis.shape[1] < 3:
        raise PreconditionError(
            f"cubic is not general: derivative span has rank {basis.shape[1]}"
        )
    return basis, complement


def plane_cubic_vsp4(F: HomogeneousForm, u,
                     residual_tol: float = RESIDUAL_TOL,
                     distinct_tol: float = DISTINCT_TOL,
                     rank_rtol=None) -> VspSample:
    """Four-term decomposition of a general plane cubic from a plane point.

    The three first partials of F span a 2-plane of conics; the 3-planes
    containing it are parametrized by the projective plane, and u picks the
    extra direction.  The chosen 3-plane is cut by two hyperplanes whose
    Veronese pullbacks are two conics; their four common zeros are the
    linear forms, with weights solved against F.
    """
    if F.n != 2 or F.degree != 3:
        raise PreconditionError("plane_cubic_vsp4 needs a plane cubic")
    basis, complement = _derivative_frame(F, rank_rtol)
    u = np.asarray(u, dtype=complex).ravel()
    if u.size != 3:
        raise PreconditionError("parameter must have 3 coordinates")
    if not np.abs(u).max() > 0:
        raise PreconditionError("parameter must be a projective point")
    span = np.column_stack([basis, complement @ u])
    functionals = kernel_basis(span.T)
    if functionals.shape[1] != 2:
        raise RejectedSampleError("selected 3-plane is degenerate")
    plane = functionals.T
    points = conic_intersection(_pullback_conic(plane[0]), _pullback_conic(plane[1]),
                                residual_tol, distinct_tol)
    forms = [LinearForm(p.coords) for p in points]
    return _accept_sample(F, forms, u, residual_tol, distinct_tol, rank_rtol)


def plane_cubic_recover_parameter(F: HomogeneousForm, dec: Decomposition,
                                  rank_rtol=None) -> np.ndarray:
    """Parameter u whose 3-plane is spanned by the four squares of dec.

    Inverts plane_cubic_vsp4 on accepted samples: the images of the four
    [L_i^2] in the quotient by the derivative span are proportional, and u
    is that common direction expressed in the complement frame.
    """
    if dec.h != 4 or dec.degree != 3:
        raise PreconditionError("need a four-term cubic decomposition")
    _, complement = _derivative_frame(F, rank_rtol)
    squares = np.column_stack([power_form(L, 2).coeffs for L in dec.forms])
    quotient = complement.conj().T @ squares
    left, sing, _ = np.linalg.svd(quotient)
    # all four quotient images must point along one direction
    if sing[0] == 0.0 or sing[1] > 1e-6 * sing[0]:
        raise PreconditionError(
            "decomposition is inconsistent with the derivative span of F"
        )
    return left[:, 0]


# ---------------------------------------------------------------------------
# chains
# ---------------------------------------------------------------------------


def _solve_family(F: HomogeneousForm, h: int, rng: np.random.Generator,
                  residual_tol, distinct_tol, rank_rtol,
                  retries: int = RETRY_BUDGET) -> Decomposition:
    """Dispatch to the constructive solver covering (n, d, h), with retries."""
    n, d = F.n, F.degree
    last = None
    for _ in range(max(1, retries)):
        try:
            if n == 1 and h <= d <= 2 * h - 1:
                u = complex_gaussian(rng, 2 * h - d)
                return sylvester_parametrize(F, h, u, residual_tol,
                                             distinct_tol, rank_rtol).decomposition
            if d == 2 and h == n + 1:
                G = HomogeneousForm(n + 1, 2, complex_gaussian(rng, num_monomials(n, 2)))
                return quadric_pencil_decompose(F, G, residual_tol,
                                                distinct_tol, rank_rtol).decomposition
            if d == 2 and h > n + 1:
                extras = [
                    (complex(complex_gaussian(rng, 1)[0]),
                     LinearForm(complex_gaussian(rng, n + 1)))
                    for _ in range(h - (n + 1))
                ]
                G = HomogeneousForm(n + 1, 2, complex_gaussian(rng, num_monomials(n, 2)))
                return quadric_sample_vsp(F, h, extras, G, residual_tol,
                                          distinct_tol, rank_rtol).decomposition
            if (n, d, h) == (2, 3, 4):
                u = complex_gaussian(rng, 3)
                return plane_cubic_vsp4(F, u, residual_tol,
                                        distinct_tol, rank_rtol).decomposition
            raise PreconditionError(
                f"no constructive solver for (n, d, h) = ({n}, {d}, {h})"
            )
        except RejectedSampleError as exc:
            last = exc
    raise RejectedSampleError(f"retry budget exhausted: {last}")


def chain_step(F: HomogeneousForm, dec: Decomposition, keep_index: int,
               seed: int, residual_tol: float = RESIDUAL_TOL,
               distinct_tol: float = DISTINCT_TOL, rank_rtol=None) -> Decomposition:
    """Replace every term except one by a freshly solved decomposition.

    Subtracts the kept term from F and decomposes the remainder with h-1
    terms through whichever constructive family covers it; the result shares
    the kept term with the input decomposition.
    """
    if not 0 <= keep_index < dec.h:
        raise IndexError(f"keep_index {keep_index} out of range for h = {dec.h}")
    w, L = dec.terms[keep_index]
    remainder = F - w * power_form(L, F.degree)
    rng = np.random.default_rng(seed)
    rest = _solve_family(remainder, dec.h - 1, rng,
                         residual_tol, distinct_tol, rank_rtol, retries=1)
    for j, other in enumerate(rest.forms):
        if projective_separation(L.coords, other.coords) <= distinct_tol:
            raise RejectedSampleError(f"kept term collides with solved term {j}")
    try:
        new = make_decomposition(F.degree, [w, *rest.weights], [L, *rest.forms],
                                 rank_rtol=rank_rtol, distinct_tol=distinct_tol)
    except PreconditionError as exc:
        raise RejectedSampleError(str(exc)) from exc
    resid = decomposition_residual(F, new)
    if resid > residual_tol:
        raise RejectedSampleError(f"residual {resid:.3e} above tolerance")
    return new


def chain_connect(F: HomogeneousForm, dec_a: Decomposition, dec_b: Decomposition,
                  seed: int, residual_tol: float = RESIDUAL_TOL,
                  distinct_tol: float = DISTINCT_TOL, rank_rtol=None,
                  retries: int = RETRY_BUDGET) -> ChainCertificate:
    """Chain of length at most three joining two quadric decompositions.

    Builds the middle decomposition from the first term of each endpoint
    plus a solved decomposition of what remains; needs h - 2 >= n + 1 so the
    remainder stays in solver range.  Degenerate intermediate pencils are
    resampled up to the retry budget.
    """
    if F.degree != 2:
        raise PreconditionError("chain_connect handles quadrics only")
    n = F.n
    h = dec_a.h
    if dec_b.h != h:
        raise PreconditionError("the two decompositions have different lengths")
    if h < n + 3:
        raise PreconditionError(
            f"need h >= n+3 = {n + 3} so the middle solve keeps h-2 >= n+1"
        )
    for name, dec in (("first", dec_a), ("second", dec_b)):
        resid = decomposition_residual(F, dec)
        if resid > residual_tol:
            raise PreconditionError(
                f"the {name} decomposition does not synthesize F "
                f"(residual {resid:.3e})"
            )
    if decompositions_close(dec_a, dec_b, tol=1e-8):
        return ChainCertificate((dec_a,), ())

    index_a, index_b = None, None
    for i in range(h):
        for j in range(h):
            sep = projective_separation(dec_a.forms[i].coords, dec_b.forms[j].coords)
            if sep > distinct_tol:
                index_a, index_b = i, j
                break
        if index_a is not None:
            break
    if index_a is None:
        raise RejectedSampleError("could not pick distinct terms from the endpoints")

    wa, La = dec_a.terms[index_a]
    wb, Lb = dec_b.terms[index_b]
    remainder = F - wa * power_form(La, 2) - wb * power_form(Lb, 2)
    rng = np.random.default_rng(seed)
    last = None
    for _ in range(max(1, retries)):
        try:
            middle_rest = _solve_family(remainder, h - 2, rng, residual_tol,
                                        distinct_tol, rank_rtol, retries=1)
            forms = [La, Lb, *middle_rest.forms]
            weights = [wa, wb, *middle_rest.weights]
            for i in range(len(forms)):
                for j in range(i + 1, len(forms)):
                    if projective_separation(forms[i].coords, forms[j].coords) <= distinct_tol:
                        raise RejectedSampleError("middle decomposition has a collision")
            try:
                middle = make_decomposition(2, weights, forms, rank_rtol=rank_rtol,
                                            distinct_tol=distinct_tol)
            except PreconditionError as exc:
                raise RejectedSampleError(str(exc)) from exc
            resid = decomposition_residual(F, middle)
            if resid > residual_tol:
                raise RejectedSampleError(f"residual {resid:.3e} above tolerance")
            return ChainCertificate((dec_a, middle, dec_b),
                                    ((index_a, 0), (1, index_b)))
        except RejectedSampleError as exc:
            last = exc
    raise RejectedSampleError(f"chain retry budget exhausted: {last}")


def check_chain(F: HomogeneousForm, cert: ChainCertificate,
                residual_tol: float = RESIDUAL_TOL,
                link_tol: float = 1e-8) -> bool:
    """Verify a chain certificate: residuals and declared shared terms."""
    if len(cert.sequence) == 0:
        return False
    if len(cert.links) != len(cert.sequence) - 1:
        return False
    for dec in cert.sequence:
        if decomposition_residual(F, dec) > residual_tol:
            return False
    for k, (i, j) in enumerate(cert.links):
        left = cert.sequence[k]
        right = cert.sequence[k + 1]
        if not (0 <= i < left.h and 0 <= j < right.h):
            return False
        ti = canonical_term(*left.terms[i], left.degree)
        tj = canonical_term(*right.terms[j], right.degree)
        if not terms_close(ti, tj, link_tol):
            return False
    return True


# ---------------------------------------------------------------------------
# tangent dimension of the sum map
# ---------------------------------------------------------------------------


def tangent_dimension(F: HomogeneousForm, dec: Decomposition,
                      rank_rtol=None, residual_tol: float = RESIDUAL_TOL) -> int:
    """Dimension of the kernel of the sum-map Jacobian at the decomposition.

    The map sends h unprojectivized linear forms to the coefficient vector
    of the sum of their d-th powers; at M_i = w_i^(1/d) L_i the Jacobian
    columns are d * w_i^((d-1)/d) * x_j L_i^(d-1).  The returned value
    h(n+1) - rank equals the local dimension of the space of decompositions
    and does not depend on the branch of the root.
    """
    if F.degree < 2:
        raise PreconditionError("tangent_dimension needs degree >= 2")
    if dec.h == 0:
        raise PreconditionError("tangent_dimension needs a nonempty decomposition")
    resid = decomposition_residual(F, dec)
    if resid > residual_tol:
        raise PreconditionError(
            f"decomposition does not synthesize F (residual {resid:.3e})"
        )
    d = F.degree
    cols = []
    for w, L in dec.terms:
        scale = d * np.power(complex(w), (d - 1) / d)
        base = power_form(L, d - 1)
        for j in range(F.num_vars):
            cols.append(scale * multiply_by_variable(base, j).coeffs)
    jac = np.column_stack(cols)
    return dec.h * F.num_vars - numerical_rank(jac, rank_rtol)


def sample_decompositions(F: HomogeneousForm, h: int, seed: int, count: int = 1,
                          residual_tol: float = RESIDUAL_TOL,
                          distinct_tol: float = DISTINCT_TOL,
                          rank_rtol=None) -> list[Decomposition]:
    """Seeded decompositions of F via whichever constructive family applies."""
    rng = np.random.default_rng(seed)
    return [
        _solve_family(F, h, rng, residual_tol, distinct_tol, rank_rtol)
        for _ in range(count)
    ]
