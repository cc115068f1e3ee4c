import numpy as np
import pytest

from waring import (
    HomogeneousForm,
    LinearForm,
    PreconditionError,
    apolar_pairing,
    apolar_space,
    catalecticant,
    is_polar_polyhedron,
    num_monomials,
    random_decomposition,
    random_form,
    synthesize,
    vanishing_forms,
)
from waring.apolarity import catalecticant_rank
from waring.linalg import numerical_rank

import oracles

X0_CUBED_PLUS_X1_CUBED = HomogeneousForm(2, 3, [1, 0, 0, 1])


def test_apolar_pairing_examples():
    d = 5
    xi0 = HomogeneousForm(2, 1, [1, 0])
    x0d = HomogeneousForm(2, d, np.eye(num_monomials(1, d))[0])
    out = apolar_pairing(xi0, x0d)
    assert out.degree == d - 1
    assert np.allclose(out.coeffs, d * np.eye(num_monomials(1, d - 1))[0])

    xi1_sq = HomogeneousForm(2, 2, [0, 0, 1])
    x0_sq = HomogeneousForm(2, 2, [1, 0, 0])
    assert np.allclose(apolar_pairing(xi1_sq, x0_sq).coeffs, [0])

    xi0xi1 = HomogeneousForm(2, 2, [0, 1, 0])
    x0sq_x1 = HomogeneousForm(2, 3, [0, 1, 0, 0])
    assert np.allclose(apolar_pairing(xi0xi1, x0sq_x1).coeffs, [2, 0])

    with pytest.raises(PreconditionError):
        apolar_pairing(x0sq_x1, xi0xi1)   # t > d


@pytest.mark.parametrize("n,d,t,seed", [(1, 4, 2, 0), (2, 3, 1, 1), (2, 4, 2, 2)])
def test_apolar_pairing_matches_dict_oracle(n, d, t, seed):
    F = random_form(n, d, seed)
    phi = random_form(n, t, seed + 50)
    got = apolar_pairing(phi, F)
    table = oracles.apolar_pair_dict(oracles.form_dict(phi), oracles.form_dict(F))
    assert np.allclose(got.coeffs, oracles.dict_to_coeffs(n, d - t, table))


def test_apolar_pairing_linearity():
    F = random_form(2, 4, 3)
    phi = random_form(2, 2, 4)
    psi = random_form(2, 2, 5)
    a, b = 1.3 - 0.2j, -0.7 + 2.1j
    combo = HomogeneousForm(3, 2, a * phi.coeffs + b * psi.coeffs)
    lhs = apolar_pairing(combo, F).coeffs
    rhs = a * apolar_pairing(phi, F).coeffs + b * apolar_pairing(psi, F).coeffs
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


@pytest.mark.parametrize("n,d,t,seed", [(1, 5, 2, 0), (2, 4, 2, 1), (2, 3, 2, 2)])
def test_catalecticant_consistent_with_pairing(n, d, t, seed):
    F = random_form(n, d, seed)
    phi = random_form(n, t, seed + 10)
    cat = catalecticant(F, t)
    lhs = cat.entries @ phi.coeffs
    rhs = apolar_pairing(phi, F).coeffs
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


def test_catalecticant_examples():
    cat = catalecticant(X0_CUBED_PLUS_X1_CUBED, 2)
    assert cat.entries.shape == (2, 3)
    assert np.allclose(cat.entries, [[6, 0, 0], [0, 0, 6]])
    from waring.linalg import kernel_basis

    ker = kernel_basis(cat.entries)
    assert ker.shape[1] == 1
    assert abs(ker[1, 0]) == pytest.approx(1.0)   # spanned by xi0 xi1

    d = 6
    x0d = HomogeneousForm(2, d, np.eye(num_monomials(1, d))[0])
    for t in (1, 2, 3):
        assert catalecticant_rank(x0d, t) == 1

    assert catalecticant_rank(random_form(1, 5, 7), 2) == 3


@pytest.mark.parametrize("n,d,seed", [(1, 5, 0), (2, 4, 1), (2, 6, 2), (3, 4, 3)])
def test_rank_symmetry(n, d, seed):
    F = random_form(n, d, seed)
    for t in range(1, d):
        assert catalecticant_rank(F, t) == catalecticant_rank(F, d - t)


def test_apolar_space_examples():
    d = 4
    x0d = HomogeneousForm(2, d, np.eye(num_monomials(1, d))[0])
    for t in (1, 2, 3):
        basis = apolar_space(x0d, t)
        expected_dim = num_monomials(1, t) - 1
        assert basis.dimension == expected_dim
        mat = basis.matrix
        # orthonormal and missing only the xi0^t direction (index 0)
        assert np.allclose(mat.conj().T @ mat, np.eye(expected_dim), atol=1e-12)
        assert np.abs(mat[0, :]).max() <= 1e-12

    basis = apolar_space(X0_CUBED_PLUS_X1_CUBED, 2)
    assert basis.dimension == 1
    assert abs(basis.matrix[1, 0]) == pytest.approx(1.0)

    xy = HomogeneousForm(2, 2, [0, 1, 0])
    basis = apolar_space(xy, 2)
    assert basis.dimension == 2
    proj = basis.matrix @ basis.matrix.conj().T
    for idx, expect in ((0, 1.0), (1, 0.0), (2, 1.0)):
        e = np.eye(3)[idx]
        assert np.linalg.norm(proj @ e) == pytest.approx(expect, abs=1e-12)


def test_apolar_dimension_plus_rank():
    for n, d, seed in [(1, 4, 0), (2, 3, 1), (2, 5, 2)]:
        F = random_form(n, d, seed)
        for t in range(1, d + 1):
            dim = apolar_space(F, t).dimension
            assert dim + catalecticant_rank(F, t) == num_monomials(n, t)


def test_vanishing_forms_examples():
    pts = [np.array([1, 0]), np.array([0, 1])]
    basis = vanishing_forms(pts, 2)
    assert len(basis) == 1
    assert abs(basis[0].coeffs[1]) == pytest.approx(1.0)

    pts = [np.array([1, 0]), np.array([0, 1]), np.array([1, 1])]
    basis = vanishing_forms(pts, 3)
    assert len(basis) == 1
    v = basis[0].coeffs
    assert abs(v[0]) <= 1e-12 and abs(v[3]) <= 1e-12
    assert abs(v[1] + v[2]) <= 1e-12     # proportional to xi0^2 xi1 - xi0 xi1^2


@pytest.mark.parametrize("d,h", [(3, 4), (3, 9), (4, 10), (5, 15)])
def test_vanishing_dimension_general_points(d, h):
    rng = np.random.default_rng(d * 100 + h)
    pts = [rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(h)]
    basis = vanishing_forms(pts, d)
    assert len(basis) == num_monomials(2, d) - h


def test_is_polar_polyhedron_examples():
    F = X0_CUBED_PLUS_X1_CUBED
    cert = is_polar_polyhedron(F, [LinearForm([1, 0]), LinearForm([0, 1])])
    assert cert.verdict and cert.inclusion_defect <= 1e-12
    assert cert.minimality_witness is None

    cert = is_polar_polyhedron(
        F, [LinearForm([1, 0]), LinearForm([0, 1]), LinearForm([1, 1])]
    )
    assert not cert.verdict
    assert cert.minimality_witness == 2

    d = 4
    x0d = HomogeneousForm(2, d, np.eye(num_monomials(1, d))[0])
    cert = is_polar_polyhedron(x0d, [LinearForm([0, 1])])
    assert not cert.verdict and cert.inclusion_defect > 1e-8

    cert = is_polar_polyhedron(x0d, [LinearForm([1, 0])])
    assert cert.verdict

    with pytest.raises(PreconditionError):
        is_polar_polyhedron(F, [])


@pytest.mark.parametrize("n,d,h,seed", [
    (1, 3, 2, 0), (1, 5, 3, 1), (2, 2, 3, 2), (2, 3, 4, 3),
    (2, 4, 7, 4), (3, 2, 4, 5), (3, 3, 8, 6),
])
def test_decomposition_apolarity_link(n, d, h, seed):
    # h <= C(n+d,d) - 1 throughout: inclusion and minimality both hold for
    # every synthetic decomposition
    assert h <= num_monomials(n, d) - 1
    dec = random_decomposition(n, d, h, seed)
    F = synthesize(dec, n)
    cert = is_polar_polyhedron(F, dec.forms)
    assert cert.verdict, cert


def test_apolar_basis_kills_the_form():
    F = random_form(2, 4, 9)
    for t in (2, 3, 4):
        basis = apolar_space(F, t)
        for phi in basis.basis:
            out = apolar_pairing(phi, F)
            assert out.norm() <= 1e-10 * F.norm()
