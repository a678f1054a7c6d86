import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kstab.action_algebra import (ActionAlgebra, MomentVector, centralizer, element_coordinates,
                                  gram_matrix, hermitian_basis, orthonormalize, project,
                                  projection_matrix, t_perp_basis)
from kstab.errors import ValidationError
from kstab.kahler_models import projective_model

coeff_lists = st.lists(st.floats(-3, 3, allow_nan=False), min_size=8, max_size=8)


@pytest.fixture(scope="module")
def su3():
    return projective_model([2], [1.0], group="full").algebra


def test_gram_matches_qmc_oracle(frozen):
    g = frozen["gram"]
    model = projective_model(g["dims"], g["scales"], group=g["group"])
    ref = np.array(g["matrix"])
    assert np.max(np.abs(model.algebra.gram - ref)) <= 1e-3 * np.max(np.abs(ref))


def test_gram_monte_carlo_method_agrees_with_closed_form():
    model = projective_model([1, 2], [1.0, 2.0])
    mc = gram_matrix(model, model.algebra.generators, method="montecarlo",
                     n_samples=200_000, rtol=1e-2)
    assert np.allclose(mc, model.algebra.gram, rtol=0, atol=2e-2 * np.abs(mc).max())


def test_structure_constants_of_su3(su3):
    assert su3.jacobi_residual() < 1e-10
    assert su3.antisymmetry_residual() < 1e-12
    assert su3.dim == 8
    assert np.all(np.linalg.eigvalsh(su3.gram) > 0)


@given(coeff_lists, coeff_lists)
@settings(max_examples=30, deadline=None)
def test_bracket_is_antisymmetric(x, y):
    alg = projective_model([2], [1.0], group="full").algebra
    assert np.allclose(alg.bracket_coeffs(x, y), -alg.bracket_coeffs(y, x), atol=1e-10)


@given(coeff_lists)
@settings(max_examples=30, deadline=None)
def test_projection_is_gram_orthogonal(x):
    alg = projective_model([2], [1.0], group="full").algebra
    tb = alg.torus_basis
    P = projection_matrix(tb, alg)
    assert np.allclose(P @ P, P, atol=1e-10)
    r = np.asarray(x) - P @ np.asarray(x)
    assert np.allclose(tb.T @ alg.gram @ r, 0, atol=1e-9)


@given(coeff_lists)
@settings(max_examples=20, deadline=None)
def test_pairing_round_trip(x):
    alg = projective_model([2], [1.0], group="full").algebra
    v = MomentVector(np.asarray(x))
    back = MomentVector.from_pairings(alg, v.pairing(alg))
    assert np.allclose(back.coeffs, v.coeffs, atol=1e-10)


def test_t_perp_commutes_with_and_is_orthogonal_to_torus(su3):
    # diag(1, 1, -2) has centralizer s(u(2) x u(1)); a regular element only the torus
    tb = su3.torus_basis[:, 1:2]
    tp = t_perp_basis(su3, tb)
    assert tp.shape[1] == 3
    assert t_perp_basis(su3, su3.torus_basis[:, :1]).shape[1] == 1
    for j in range(tp.shape[1]):
        assert np.allclose(su3.bracket_coeffs(tb[:, 0], tp[:, j]), 0, atol=1e-9)
        assert abs(su3.inner(tb[:, 0], tp[:, j])) < 1e-9


def test_centralizer_of_maximal_torus_is_itself(su3):
    c = centralizer(su3, su3.torus_basis)
    assert c.shape[1] == 2
    assert np.allclose(projection_matrix(su3.torus_basis, su3) @ c, c, atol=1e-9)


def test_orthonormalize_drops_dependent_columns(su3):
    b = np.concatenate([su3.torus_basis, su3.torus_basis[:, :1] * 2], axis=1)
    ob = orthonormalize(b, su3)
    assert ob.shape[1] == 2
    assert np.allclose(ob.T @ su3.gram @ ob, np.eye(2), atol=1e-10)


def test_project_moment_vector(su3):
    v = MomentVector(np.arange(8.0))
    pv = project(v, su3.torus_basis, su3)
    assert np.allclose(project(pv, su3.torus_basis, su3).coeffs, pv.coeffs)


def test_element_coordinates_round_trip(su3):
    x = np.linspace(-1, 1, 8)
    blocks = su3.element(x)
    assert np.allclose(element_coordinates(su3, blocks), x, atol=1e-10)
    # identity parts are invisible
    shifted = (blocks[0] + 3 * np.eye(3),)
    assert np.allclose(element_coordinates(su3, shifted), x, atol=1e-10)


def test_element_outside_algebra_is_rejected():
    alg = projective_model([2], [1.0]).algebra     # torus only
    with pytest.raises(ValidationError):
        element_coordinates(alg, [hermitian_basis(3)[0]])


def test_non_hermitian_generator_is_rejected():
    bad = np.array([[0, 1], [0, 0]], complex)
    with pytest.raises(ValidationError, match="generator 0 block 0"):
        ActionAlgebra.build([1], [1.0], [(bad,)])


def test_dependent_generators_are_rejected():
    g = np.diag([1.0, -1.0]).astype(complex)
    with pytest.raises(ValidationError, match="positive definite"):
        ActionAlgebra.build([1], [1.0], [(g,), (2 * g,)])


def test_non_abelian_torus_is_rejected():
    basis = hermitian_basis(2)
    with pytest.raises(ValidationError, match="abelian"):
        ActionAlgebra.build([1], [1.0], [(b,) for b in basis], torus_indices=[0, 1])
