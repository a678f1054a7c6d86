import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kstab import stability_engine as se
from kstab.action_algebra import MomentVector
from kstab.errors import ValidationError
from kstab.kahler_models import (OrbitPoint, hamiltonian_values, laplacian_values,
                                 perturbed_moment, projective_model)


def _classify(dims, scales, group, pt, **kw):
    model = projective_model(dims, scales, group, point=pt)
    return model, se.classify(model, model.point(), **kw)


@pytest.mark.parametrize("dims,scales,group,pt,expected", [
    ([2], [1.0], "full", [[1, 0, 0]], "relatively_stable"),
    ([2], [1.0], "torus", [[1, 1, 1]], "stable"),
    ([2], [1.0], "torus", [[1, 1, 0]], "relatively_stable"),
    ([3], [1.0], "torus", [[1, 1, 1, 1]], "stable"),
    ([1, 1, 1], [1.0, 1.0, 1.0], "diagonal", [[1, 0], [1, 0], [1, 1]], "unstable"),
    ([1, 1, 1], [2.0, 1.0, 1.0], "diagonal", [[1, 0], [1, 1], [1, 1]], "semistable_strict"),
])
def test_forced_classifications(dims, scales, group, pt, expected):
    _, v = _classify(dims, scales, group, pt)
    assert v.classification == expected


def test_unstable_witness_has_negative_weight_at_a_fixed_limit():
    model, v = _classify([1, 1, 1], [1.0, 1.0, 1.0], "diagonal", [[1, 0], [1, 0], [1, 1]])
    w = v.witness
    assert w["weight"] < -se.WEIGHT_TOL
    assert se._fixed_residual(model, w["q"], w["xi"]) < 1e-8


def test_orbit_zero_residual():
    model = projective_model([1, 2], [1.0, 2.0], point=[[1, 0.7], [1, 0.8, 1.3]])
    p = model.point()
    for d in (0.0, 0.05):
        z = se.find_orbit_zero(model, p, d)
        assert z.found and z.residual <= se.RESIDUAL_TOL
        assert perturbed_moment(model, z.q, d).norm(model.algebra) <= 1e-8


def test_no_false_zero_on_a_semistable_orbit():
    model = projective_model([1, 1, 1], [2.0, 1.0, 1.0], "diagonal",
                             point=[[1, 0], [1, 1], [1, 1]])
    red = se.reduction(model, model.point())
    assert not se.find_orbit_zero(model, model.point(), 0.05, red.t_perp).found


def test_weight_eigenspace_formula_matches_flow():
    rng = np.random.default_rng(1)
    model = projective_model([1, 2], [1.0, 2.0], "full")
    for _ in range(10):
        p = OrbitPoint.create([rng.normal(size=2) + 1j * rng.normal(size=2),
                               rng.normal(size=3) + 1j * rng.normal(size=3)], model.factors)
        r = se.weight(model, p, rng.normal(size=model.algebra.dim))
        assert r.converged and r.flow_discrepancy < 1e-8


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-2))
@settings(max_examples=25, deadline=None)
def test_weights_are_nonnegative_at_a_stable_point(xi):
    model = projective_model([1, 2], [1.0, 2.0], point=[[1, 0.7], [1, 0.8, 1.3]])
    assert se.weight(model, model.point(), xi, verify=False).w_mu > 0


def test_alldelta_constant_on_demos(demos):
    for name, model in demos.items():
        rep = se.alldelta_check(model, model.point(), [0.01, 0.02, 0.05, 0.1])
        assert rep.constant, name
        assert rep.consistent, name


def test_alldelta_rejects_delta_outside_range(demos):
    model = demos["balanced_p3"]
    with pytest.raises(ValidationError):
        se.alldelta_check(model, model.point(), [0.2])
    with pytest.raises(ValidationError):
        se.alldelta_check(model, model.point(), [0.0])


def test_continuation_zero_on_synthetic_family():
    model = projective_model([1, 2], [1.0, 2.0], point=[[1, 0.7], [1, 0.8, 1.3]])
    eps = 0.05

    def family(q):
        h = hamiltonian_values(model, q)
        extra = eps ** 2 * np.sin(np.arange(1, len(h) + 1) * h)
        return MomentVector.from_pairings(model.algebra, h + eps * laplacian_values(model, q) + extra)

    res = se.continuation_zero(model, model.point(), family, eps)
    assert res.success and res.residual <= 1e-8


def test_reduction_of_fixed_point():
    model = projective_model([3], [1.0], "full", point=[[1, 0, 0, 0]])
    red = se.reduction(model, model.point())
    assert red.stabilizer.shape[1] == 9        # u(3) inside su(4)
    assert red.torus.shape[1] == 3
    assert red.t_perp.shape[1] == 0
