"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.  Tolerances are pinned here and never loosened at run
time; runtime budgets are asserted.
"""

import functools
import time

import numpy as np

from waring import (
    HomogeneousForm,
    canonical_form,
    chain_connect,
    check_chain,
    decompositions_close,
    is_polar_polyhedron,
    make_decomposition,
    num_monomials,
    plane_cubic_recover_parameter,
    plane_cubic_vsp4,
    quadric_pencil_decompose,
    random_decomposition,
    random_form,
    sample_decompositions,
    solve_weights,
    sylvester_parametrize,
    synthesize,
    tangent_dimension,
    terracini_dim,
)
from waring.apolarity import apolar_pairing, catalecticant, catalecticant_rank
from waring.forms import complex_gaussian, permute_linear, permute_variables

RESIDUAL_TOL = 1e-8
CANONICAL_TOL = 1e-6
RANK_RTOL = 1e-10


def criterion(number, name, budget_seconds):
    def wrap(fn):
        @functools.wraps(fn)
        def runner():
            start = time.perf_counter()
            try:
                fn()
                elapsed = time.perf_counter() - start
                assert elapsed < budget_seconds, (
                    f"runtime {elapsed:.2f}s exceeds the {budget_seconds}s budget"
                )
            except BaseException:
                elapsed = time.perf_counter() - start
                print(f"ACCEPTANCE {number} {name}: FAIL ({elapsed:.2f}s)")
                raise
            print(f"ACCEPTANCE {number} {name}: PASS ({elapsed:.2f}s)")
        return runner
    return wrap


@criterion(1, "dimension-formula", 10.0)
def test_criterion_1_dimension_formula():
    grid = {
        (1, 3, 2): 0, (1, 5, 3): 0, (2, 3, 4): 2, (2, 4, 6): 3,
        (2, 5, 7): 0, (2, 6, 10): 2, (3, 3, 5): 0, (4, 3, 8): 5,
    }
    for (n, d, h), expected in grid.items():
        dec = random_decomposition(n, d, h, seed=n + 10 * d + 100 * h)
        F = synthesize(dec, n)
        dim = tangent_dimension(F, dec, rank_rtol=RANK_RTOL)
        assert dim == expected == h * (n + 1) - num_monomials(n, d), \
            f"(n,d,h)=({n},{d},{h}): got {dim}, expected {expected}"


@criterion(2, "quintic-uniqueness", 5.0)
def test_criterion_2_hilbert_uniqueness():
    for k in range(20):
        planted = random_decomposition(2, 5, 7, seed=8000 + k)
        F = synthesize(planted, 2)
        assert tangent_dimension(F, planted, rank_rtol=RANK_RTOL) == 0

        # two solver-free checks: re-solve the weights after independent
        # variable shuffles and compare the canonical decompositions
        rng = np.random.default_rng(8100 + k)
        recovered = []
        for _ in range(2):
            perm = list(rng.permutation(3))
            inverse = [perm.index(i) for i in range(3)]
            shuffled_form = permute_variables(F, perm)
            shuffled_forms = [permute_linear(L, perm) for L in planted.forms]
            weights, resid = solve_weights(shuffled_form, shuffled_forms)
            assert resid <= RESIDUAL_TOL
            recovered.append(make_decomposition(
                5, weights, [permute_linear(L, inverse) for L in shuffled_forms]
            ))
        assert decompositions_close(recovered[0], recovered[1], CANONICAL_TOL)
        assert decompositions_close(recovered[0], planted, CANONICAL_TOL)


@criterion(3, "binary-parametrization", 10.0)
def test_criterion_3_sylvester_round_trip():
    for h in range(2, 7):
        for d in range(h, 2 * h):
            F = random_form(1, d, seed=1000 + 17 * h + d)
            rng = np.random.default_rng(2000 + 17 * h + d)
            reference = None
            for trial in range(50):
                u = complex_gaussian(rng, 2 * h - d)
                sample = sylvester_parametrize(F, h, u)
                assert sample.residual <= RESIDUAL_TOL, (h, d, trial)
                if d == 2 * h - 1:
                    canon = canonical_form(sample.decomposition)
                    if reference is None:
                        reference = canon
                    else:
                        assert decompositions_close(reference, canon,
                                                    CANONICAL_TOL), (h, d, trial)


@criterion(4, "quadric-pencil", 20.0)
def test_criterion_4_quadric_pencil():
    for n in range(2, 9):
        for trial in range(50):
            F = random_form(n, 2, seed=3000 + 97 * n + trial)
            G = random_form(n, 2, seed=4000 + 97 * n + trial)
            result = quadric_pencil_decompose(F, G)
            assert result.residual <= RESIDUAL_TOL
            mu = result.eigenvalues
            scale = np.abs(mu).max()
            assert all(abs(mu[i] - mu[j]) > 1e-8 * scale
                       for i in range(n + 1) for j in range(i + 1, n + 1))
            a, b = 0.7 - 0.3j, 1.1 + 0.2j
            moved = HomogeneousForm(n + 1, 2, a * G.coeffs + b * F.coeffs)
            other = quadric_pencil_decompose(F, moved)
            assert decompositions_close(result.decomposition,
                                        other.decomposition, CANONICAL_TOL)


@criterion(5, "cubic-parametrization", 30.0)
def test_criterion_5_plane_cubic():
    for k in range(100):
        F = random_form(2, 3, seed=5000 + k)
        u = complex_gaussian(np.random.default_rng(6000 + k), 3)
        sample = plane_cubic_vsp4(F, u)
        assert sample.decomposition.h == 4
        assert sample.residual <= RESIDUAL_TOL
        assert is_polar_polyhedron(F, sample.decomposition.forms).verdict
    for k in range(25):
        planted = random_decomposition(2, 3, 4, seed=6500 + k)
        F = synthesize(planted, 2)
        u = plane_cubic_recover_parameter(F, planted)
        sample = plane_cubic_vsp4(F, u)
        assert decompositions_close(sample.decomposition, planted, CANONICAL_TOL)


@criterion(6, "chain-connectivity", 20.0)
def test_criterion_6_chains():
    for n, h in ((2, 6), (3, 7)):
        for k in range(25):
            F = random_form(n, 2, seed=7000 + 31 * n + k)
            dec_a, dec_b = sample_decompositions(F, h, seed=7100 + 31 * n + k,
                                                 count=2)
            cert = chain_connect(F, dec_a, dec_b, seed=7200 + 31 * n + k)
            assert len(cert.sequence) <= 3
            assert check_chain(F, cert, residual_tol=RESIDUAL_TOL)


@criterion(7, "secant-defectivity", 30.0)
def test_criterion_7_defectivity():
    defective = [(2, 2, 2), (3, 2, 2), (3, 2, 3), (2, 4, 5), (3, 4, 9),
                 (4, 3, 7), (4, 4, 14)]
    controls = [(1, 3, 2), (1, 5, 3), (1, 7, 4), (1, 9, 6), (2, 3, 4), (2, 5, 7)]
    for n, d, h in defective:
        dims = {terracini_dim(n, d, h, seed).computed_dim for seed in range(5)}
        assert len(dims) == 1, f"unstable at ({n},{d},{h})"
        report = terracini_dim(n, d, h, 0)
        assert report.defective, f"({n},{d},{h}) should be defective"
    for n, d, h in controls:
        dims = {terracini_dim(n, d, h, seed).computed_dim for seed in range(5)}
        assert len(dims) == 1, f"unstable at ({n},{d},{h})"
        report = terracini_dim(n, d, h, 0)
        assert not report.defective, f"({n},{d},{h}) should not be defective"


@criterion(8, "apolarity-identities", 20.0)
def test_criterion_8_apolarity():
    # pairing-vs-matrix consistency and rank symmetry on random instances
    cases = [(1, 4), (1, 6), (2, 3), (2, 4), (2, 5), (3, 3)]
    for idx, (n, d) in enumerate(cases):
        F = random_form(n, d, seed=200 + idx)
        for t in range(1, d):
            phi = random_form(n, t, seed=300 + 10 * idx + t)
            lhs = catalecticant(F, t).entries @ phi.coeffs
            rhs = apolar_pairing(phi, F).coeffs
            scale = max(np.linalg.norm(rhs), 1e-300)
            assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale
            assert catalecticant_rank(F, t) == catalecticant_rank(F, d - t)

    # 200 synthetic polar polyhedra, zero false negatives
    pool = []
    for n in (1, 2, 3):
        for d in (2, 3, 4, 5):
            top = min(num_monomials(n, d) - 1, 9)
            pool.extend((n, d, h) for h in range(1, top + 1))
    for count in range(200):
        n, d, h = pool[count % len(pool)]
        dec = random_decomposition(n, d, h, seed=9000 + count)
        F = synthesize(dec, n)
        cert = is_polar_polyhedron(F, dec.forms)
        assert cert.verdict, (n, d, h, count, cert)
