"""Dense homogeneous forms, linear forms, and weighted power-sum decompositions.

Conventions frozen for the whole package:

* coefficients are plain monomial coefficients, ``F = sum_a f_a x^a``, stored
  as complex double vectors (the apolarity pairing carries the factorial
  factors, see :mod:`waring.apolarity`);
* within a fixed degree, monomials are ordered lexicographically descending
  on exponent vectors; catalecticant row/column indexing depends on this
  order, so do not change it;
* "general" polynomials are realized as seeded complex Gaussian samples and
  every probabilistic routine takes an explicit seed;
* all values are immutable after construction and all operations are pure
  functions of their inputs and seed, so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PreconditionError
from .linalg import numerical_rank

# Magnitude below PIVOT_TOL times the largest coordinate counts as zero when
# choosing the projective normalization pivot.
PIVOT_TOL = 1e-12
# Projective separation below which two points / linear forms count as equal.
DISTINCT_TOL = 1e-8
# Weights below WEIGHT_RTOL times the largest weight violate the
# nonzero-weight invariant of a decomposition.
WEIGHT_RTOL = 1e-10

# An exponent vector is a tuple of n+1 non-negative integers summing to the
# ambient degree; it indexes one monomial of that degree.
ExponentVector = tuple


def num_monomials(n: int, d: int) -> int:
    """Number of degree-d monomials in n+1 variables, C(n+d, d)."""
    return math.comb(n + d, d)


@lru_cache(maxsize=None)
def monomial_basis(n: int, d: int) -> tuple[ExponentVector, ...]:
    """All degree-d exponent vectors in n+1 variables, lex descending.

    The order is deterministic and frozen: (d,0,...,0) first, (0,...,0,d)
    last.  Length is C(n+d, d).
    """
    if n < 0 or d < 0:
        raise PreconditionError("monomial_basis needs n >= 0 and d >= 0")

    def rec(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in rec(total - first, parts - 1):
                yield (first,) + rest

    return tuple(rec(d, n + 1))


@lru_cache(maxsize=None)
def exponent_matrix(n: int, d: int) -> np.ndarray:
    """monomial_basis(n, d) stacked as a C(n+d,d) x (n+1) integer matrix."""
    mat = np.array(monomial_basis(n, d), dtype=np.int64).reshape(
        num_monomials(n, d), n + 1
    )
    mat.flags.writeable = False
    return mat


@lru_cache(maxsize=None)
def _index_table(n: int, d: int) -> dict:
    return {alpha: i for i, alpha in enumerate(monomial_basis(n, d))}


def monomial_index(n: int, d: int, alpha) -> int:
    """Position of the exponent vector alpha in monomial_basis(n, d)."""
    return _index_table(n, d)[tuple(alpha)]


def multinomial(d: int, alpha) -> int:
    """d! / prod(alpha_i!), the expansion coefficient of x^alpha in L^d."""
    out = math.factorial(d)
    for a in alpha:
        out //= math.factorial(a)
    return out


@lru_cache(maxsize=None)
def _multinomial_vector(n: int, d: int) -> np.ndarray:
    v = np.array([multinomial(d, a) for a in monomial_basis(n, d)], dtype=float)
    v.flags.writeable = False
    return v


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class HomogeneousForm:
    """A degree-d form in num_vars = n+1 variables as a dense coefficient
    vector in the canonical monomial order.

    Degree 0 (constants) is allowed because apolar pairing at top degree
    produces scalars.
    """

    num_vars: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.num_vars < 1 or self.degree < 0:
            raise PreconditionError("need num_vars >= 1 and degree >= 0")
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        expected = num_monomials(self.num_vars - 1, self.degree)
        if c.size != expected:
            raise ValueError(
                f"expected {expected} coefficients for degree {self.degree} "
                f"in {self.num_vars} variables, got {c.size}"
            )
        object.__setattr__(self, "coeffs", _freeze(c))

    @property
    def n(self) -> int:
        return self.num_vars - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def evaluate(self, point) -> complex:
        p = np.asarray(point, dtype=complex).ravel()
        e = exponent_matrix(self.n, self.degree)
        return complex(self.coeffs @ np.prod(p[None, :] ** e, axis=1))

    def _check_compatible(self, other):
        if self.num_vars != other.num_vars or self.degree != other.degree:
            raise ValueError("forms live in different spaces")

    def __add__(self, other):
        self._check_compatible(other)
        return HomogeneousForm(self.num_vars, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_compatible(other)
        return HomogeneousForm(self.num_vars, self.degree, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return HomogeneousForm(self.num_vars, self.degree, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)


@dataclass(frozen=True, eq=False)
class LinearForm:
    """A nonzero linear form L = a_0 x_0 + ... + a_n x_n.

    Coordinates are stored as given; the projective normalization (first
    nonzero coordinate equal to 1) is applied by :meth:`normalized` and by
    :func:`canonical_form`, which also rescales the attached weight.
    """

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=complex).ravel()
        if c.size < 1 or not np.abs(c).max() > 0.0:
            raise ValueError("linear form must not be identically zero")
        object.__setattr__(self, "coords", _freeze(c))

    @property
    def num_vars(self) -> int:
        return self.coords.size

    def normalized(self) -> tuple[complex, "LinearForm"]:
        """(pivot, L/pivot) with the first nonzero coordinate scaled to 1."""
        k = _pivot_index(self.coords)
        pivot = complex(self.coords[k])
        return pivot, LinearForm(projective_normalize(self.coords))


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of projective space, stored in normalized coordinates."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _freeze(projective_normalize(self.coords)))


def _pivot_index(coords: np.ndarray) -> int:
    mags = np.abs(coords)
    m = mags.max()
    if not m > 0.0:
        raise ValueError("cannot normalize the zero vector")
    return int(np.argmax(mags > PIVOT_TOL * m))


def projective_normalize(coords) -> np.ndarray:
    """Scale so the first coordinate of magnitude > PIVOT_TOL * max is 1.

    Coordinates before the pivot (all below the threshold) are flushed to
    exact zeros and the pivot to exactly 1, so normalization is idempotent
    and canonical representatives sort deterministically.
    """
    c = np.asarray(coords, dtype=complex).ravel()
    k = _pivot_index(c)
    out = c / c[k]
    out[:k] = 0.0
    out[k] = 1.0
    return out


def projective_separation(u, v) -> float:
    """Sine of the principal angle between two projective points; 0 iff equal.

    Computed as the Gram-Schmidt residual of one unit vector against the
    other, which stays accurate down to machine precision for nearly equal
    points (1 - cos^2 would lose half the digits).
    """
    a = np.asarray(u, dtype=complex).ravel()
    b = np.asarray(v, dtype=complex).ravel()
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("projective points must be nonzero")
    a = a / na
    b = b / nb
    return float(np.linalg.norm(b - a * np.vdot(a, b)))


@dataclass(frozen=True, eq=False)
class Decomposition:
    """A weighted sum of d-th powers of linear forms, F = sum w_i L_i^d.

    A valid decomposition (see :func:`validate_decomposition`) has nonzero
    weights, pairwise projectively distinct forms, and linearly independent
    powers L_i^d.  Compare decompositions with :func:`decompositions_close`,
    not ``==`` (equality is identity).
    """

    degree: int
    terms: tuple

    def __post_init__(self):
        if self.degree < 1:
            raise PreconditionError("decomposition degree must be >= 1")
        terms = tuple((complex(w), L) for w, L in self.terms)
        object.__setattr__(self, "terms", terms)

    @property
    def h(self) -> int:
        return len(self.terms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.terms], dtype=complex)

    @property
    def forms(self) -> list[LinearForm]:
        return [L for _, L in self.terms]


def validate_decomposition(dec: Decomposition, rank_rtol=None,
                           distinct_tol: float = DISTINCT_TOL,
                           weight_rtol: float = WEIGHT_RTOL) -> None:
    """Raise PreconditionError when a decomposition invariant fails."""
    if dec.h == 0:
        return
    forms = dec.forms
    for i in range(dec.h):
        if forms[i].num_vars != forms[0].num_vars:
            raise PreconditionError("linear forms live in different spaces")
        for j in range(i + 1, dec.h):
            if projective_separation(forms[i].coords, forms[j].coords) <= distinct_tol:
                raise PreconditionError(
                    f"linear forms {i} and {j} coincide projectively"
                )
    powers = np.column_stack([power_form(L, dec.degree).coeffs for L in forms])
    norms = np.linalg.norm(powers, axis=0)
    # the nonzero-weight test must not depend on how each L_i is scaled, so
    # compare the term contributions |w_i| * ||L_i^d|| instead of raw weights
    contributions = np.abs(dec.weights) * norms
    if contributions.max() == 0.0 or \
            contributions.min() <= weight_rtol * contributions.max():
        raise PreconditionError("decomposition has a vanishing weight")
    if numerical_rank(powers / norms, rank_rtol) < dec.h:
        raise PreconditionError("the powers L_i^d are linearly dependent")


def make_decomposition(degree: int, weights, forms, rank_rtol=None,
                       distinct_tol: float = DISTINCT_TOL,
                       weight_rtol: float = WEIGHT_RTOL) -> Decomposition:
    """Build and validate a decomposition from parallel weight/form lists."""
    dec = Decomposition(degree, tuple(zip(list(weights), list(forms))))
    validate_decomposition(dec, rank_rtol=rank_rtol, distinct_tol=distinct_tol,
                           weight_rtol=weight_rtol)
    return dec


def canonical_term(weight: complex, form: LinearForm, degree: int):
    """Absorb the projective normalization of L into the weight: w (cL)^d."""
    pivot, normalized = form.normalized()
    return weight * pivot ** degree, normalized


def _coord_sort_key(coords: np.ndarray):
    # quantize so sub-1e-9 noise cannot flip the order of near-tied
    # components; genuinely distinct coordinates decide the comparison
    key = []
    for z in coords:
        key.append(round(z.real, 9) + 0.0)
        key.append(round(z.imag, 9) + 0.0)
    return tuple(key)


def canonical_form(dec: Decomposition) -> Decomposition:
    """Canonical representative for comparing decompositions.

    Every linear form is normalized (first nonzero coordinate 1, weight
    rescaled by the d-th power of the pivot) and terms are sorted
    lexicographically on real-then-imaginary parts of the coordinates.
    Idempotent and invariant under permutations of the terms.
    """
    terms = [canonical_term(w, L, dec.degree) for w, L in dec.terms]
    terms.sort(key=lambda t: _coord_sort_key(t[1].coords))
    return Decomposition(dec.degree, tuple(terms))


def terms_close(t1, t2, tol: float) -> bool:
    """Compare two canonicalized (weight, form) terms coordinatewise."""
    w1, L1 = t1
    w2, L2 = t2
    if L1.num_vars != L2.num_vars:
        return False
    wscale = max(1.0, abs(w1), abs(w2))
    if abs(w1 - w2) > tol * wscale:
        return False
    cscale = max(1.0, float(np.abs(L1.coords).max()), float(np.abs(L2.coords).max()))
    return float(np.abs(L1.coords - L2.coords).max()) <= tol * cscale


def decompositions_close(a: Decomposition, b: Decomposition, tol: float = 1e-8) -> bool:
    """Whether two decompositions agree termwise after canonicalization.

    Terms are matched by nearest canonical coordinates rather than by
    position, so the comparison does not hinge on how ties in the canonical
    sort were broken.
    """
    if a.degree != b.degree or a.h != b.h:
        return False
    ca = canonical_form(a).terms
    remaining = list(canonical_form(b).terms)
    for ta in ca:
        best = None
        best_dist = np.inf
        for k, tb in enumerate(remaining):
            if tb[1].num_vars != ta[1].num_vars:
                continue
            dist = float(np.abs(ta[1].coords - tb[1].coords).max())
            if dist < best_dist:
                best, best_dist = k, dist
        if best is None or not terms_close(ta, remaining[best], tol):
            return False
        remaining.pop(best)
    return True


# ---------------------------------------------------------------------------
# operations on forms
# ---------------------------------------------------------------------------


def power_form(L: LinearForm, d: int) -> HomogeneousForm:
    """d-th power of a linear form.

    The coefficient of x^a is multinomial(d; a) * prod_j L_j^{a_j}.
    """
    if d < 1:
        raise PreconditionError("power_form needs d >= 1")
    n = L.num_vars - 1
    e = exponent_matrix(n, d)
    coeffs = _multinomial_vector(n, d) * np.prod(L.coords[None, :] ** e, axis=1)
    return HomogeneousForm(n + 1, d, coeffs)


def synthesize(dec: Decomposition, n: int) -> HomogeneousForm:
    """sum_i w_i L_i^d as a dense form; the empty sum is the zero form."""
    total = np.zeros(num_monomials(n, dec.degree), dtype=complex)
    for w, L in dec.terms:
        if L.num_vars != n + 1:
            raise ValueError("linear form has the wrong number of variables")
        total += w * power_form(L, dec.degree).coeffs
    return HomogeneousForm(n + 1, dec.degree, total)


@lru_cache(maxsize=None)
def _derivative_tables(n: int, d: int, i: int):
    src = []
    dst = []
    mult = []
    table = _index_table(n, d - 1)
    for idx, alpha in enumerate(monomial_basis(n, d)):
        if alpha[i] == 0:
            continue
        lowered = list(alpha)
        lowered[i] -= 1
        src.append(idx)
        dst.append(table[tuple(lowered)])
        mult.append(alpha[i])
    return (_freeze(np.array(src, dtype=np.int64)),
            _freeze(np.array(dst, dtype=np.int64)),
            _freeze(np.array(mult, dtype=float)))


def partial_derivative(F: HomogeneousForm, i: int) -> HomogeneousForm:
    """dF/dx_i on plain monomial coefficients: f_a -> a_i f_a reindexed."""
    if F.degree < 1:
        raise PreconditionError("cannot differentiate a constant form")
    if not 0 <= i < F.num_vars:
        raise PreconditionError(f"variable index {i} out of range")
    src, dst, mult = _derivative_tables(F.n, F.degree, i)
    out = np.zeros(num_monomials(F.n, F.degree - 1), dtype=complex)
    out[dst] = mult * F.coeffs[src]
    return HomogeneousForm(F.num_vars, F.degree - 1, out)


@lru_cache(maxsize=None)
def _shift_tables(n: int, d: int, i: int):
    table = _index_table(n, d + 1)
    dst = []
    for alpha in monomial_basis(n, d):
        raised = list(alpha)
        raised[i] += 1
        dst.append(table[tuple(raised)])
    return _freeze(np.array(dst, dtype=np.int64))


def multiply_by_variable(F: HomogeneousForm, i: int) -> HomogeneousForm:
    """x_i * F; the only product the solvers need (monomial shift)."""
    if not 0 <= i < F.num_vars:
        raise PreconditionError(f"variable index {i} out of range")
    dst = _shift_tables(F.n, F.degree, i)
    out = np.zeros(num_monomials(F.n, F.degree + 1), dtype=complex)
    out[dst] = F.coeffs
    return HomogeneousForm(F.num_vars, F.degree + 1, out)


def derivative_span(F: HomogeneousForm, l: int, rank_rtol=None):
    """All order-l partial derivatives of F and the dimension of their span.

    Returns (derivatives, rank) where the list has C(n+l, l) entries and the
    rank is the numerical rank of their stacked coefficient matrix.
    """
    if not 1 <= l < F.degree:
        raise PreconditionError("need 1 <= l < degree")
    derivs = []
    for alpha in monomial_basis(F.n, l):
        g = F
        for var, count in enumerate(alpha):
            for _ in range(count):
                g = partial_derivative(g, var)
        derivs.append(g)
    stacked = np.stack([g.coeffs for g in derivs])
    return derivs, numerical_rank(stacked, rank_rtol)


def veronese(L: LinearForm, d: int) -> ProjectivePoint:
    """Coordinates of [L^d] on the degree-d Veronese variety, normalized."""
    return ProjectivePoint(power_form(L, d).coeffs)


def permute_variables(F: HomogeneousForm, perm) -> HomogeneousForm:
    """Form G with G(x_0, ..., x_n) = F(x_{perm[0]}, ..., x_{perm[n]})."""
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(F.num_vars)):
        raise ValueError("perm must be a permutation of the variable indices")
    out = np.zeros_like(np.asarray(F.coeffs))
    n, d = F.n, F.degree
    for idx, alpha in enumerate(monomial_basis(n, d)):
        beta = [0] * (n + 1)
        for i, a in enumerate(alpha):
            beta[perm[i]] = a
        out[monomial_index(n, d, beta)] = F.coeffs[idx]
    return HomogeneousForm(F.num_vars, d, out)


def permute_linear(L: LinearForm, perm) -> LinearForm:
    """Linear form counterpart of :func:`permute_variables`."""
    perm = [int(p) for p in perm]
    out = np.zeros(L.num_vars, dtype=complex)
    for i, p in enumerate(perm):
        out[p] = L.coords[i]
    return LinearForm(out)


# ---------------------------------------------------------------------------
# seeded random instances standing in for "general" data
# ---------------------------------------------------------------------------


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. standard complex Gaussians, CN(0, 1)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_form(n: int, d: int, seed: int) -> HomogeneousForm:
    """Seeded random form with i.i.d. complex Gaussian coefficients."""
    rng = np.random.default_rng(seed)
    return HomogeneousForm(n + 1, d, complex_gaussian(rng, num_monomials(n, d)))


def random_decomposition(n: int, d: int, h: int, seed: int,
                         attempts: int = 16) -> Decomposition:
    """Seeded random h-term decomposition with validated invariants.

    Sampling violates an invariant only on a measure-zero set; on violation
    the whole decomposition is resampled, up to ``attempts`` times.
    """
    if h < 1:
        raise PreconditionError("random_decomposition needs h >= 1")
    if h > num_monomials(n, d):
        raise PreconditionError(
            f"h = {h} powers of degree {d} in {n + 1} variables can never be "
            f"linearly independent (max {num_monomials(n, d)})"
        )
    rng = np.random.default_rng(seed)
    last = None
    for _ in range(attempts):
        coords = complex_gaussian(rng, (h, n + 1))
        weights = complex_gaussian(rng, h)
        try:
            return make_decomposition(d, weights, [LinearForm(c) for c in coords])
        except PreconditionError as exc:    # pragma: no cover - measure zero
            last = exc
    raise PreconditionError(f"could not sample a valid decomposition: {last}")
