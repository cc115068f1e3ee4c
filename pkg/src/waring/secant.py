"""Secant-variety dimensions of Veronese varieties via tangent-space spans.

The tangent space to the secant variety at a general point is the span of
the tangent spaces at the sampled points, so the dimension reduces to one
numerical rank.  Random points stand in for general ones; a report is
labeled stable when several independent seeds agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .linalg import numerical_rank
from .forms import (
    HomogeneousForm,
    LinearForm,
    complex_gaussian,
    multiply_by_variable,
    num_monomials,
    power_form,
)


@dataclass(frozen=True)
class SecantReport:
    """Expected vs computed secant dimension for h points on the degree-d
    Veronese of the projective n-space, plus the dimension the space of
    decompositions would have."""

    n: int
    d: int
    h: int
    expected_dim: int
    computed_dim: int
    defective: bool
    vsp_dim_formula: int


def expected_secant_dim(n: int, d: int, h: int) -> int:
    """min(h(n+1) - 1, N) with N the dimension of the space of forms."""
    if h < 1:
        raise PreconditionError("expected_secant_dim needs h >= 1")
    return min(h * (n + 1) - 1, num_monomials(n, d) - 1)


def veronese_tangent_basis(L: LinearForm, d: int) -> list[HomogeneousForm]:
    """The n+1 forms x_i L^(d-1) spanning the affine tangent cone at [L^d]."""
    if d < 1:
        raise PreconditionError("veronese_tangent_basis needs d >= 1")
    m = L.num_vars
    if d == 1:
        basis = []
        for i in range(m):
            coeffs = np.zeros(m, dtype=complex)
            coeffs[i] = 1.0
            basis.append(HomogeneousForm(m, 1, coeffs))
        return basis
    base = power_form(L, d - 1)
    return [multiply_by_variable(base, i) for i in range(m)]


def terracini_dim(n: int, d: int, h: int, seed: int, rank_rtol=None) -> SecantReport:
    """Secant dimension from the stacked tangent bases at h random points."""
    if h < 1:
        raise PreconditionError("terracini_dim needs h >= 1")
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(h):
        L = LinearForm(complex_gaussian(rng, n + 1))
        rows.extend(g.coeffs for g in veronese_tangent_basis(L, d))
    computed = numerical_rank(np.stack(rows), rank_rtol) - 1
    expected = expected_secant_dim(n, d, h)
    return SecantReport(
        n=n,
        d=d,
        h=h,
        expected_dim=expected,
        computed_dim=computed,
        defective=computed < expected,
        vsp_dim_formula=h * (n + 1) - num_monomials(n, d),
    )


def stable_report(n: int, d: int, h: int, seed: int, trials: int = 5,
                  rank_rtol=None) -> tuple[SecantReport, bool]:
    """Report at the base seed plus agreement across `trials` derived seeds."""
    reports = [terracini_dim(n, d, h, seed + k, rank_rtol) for k in range(trials)]
    stable = len({r.computed_dim for r in reports}) == 1
    return reports[0], stable
