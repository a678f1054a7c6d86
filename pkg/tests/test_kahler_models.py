import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kstab.errors import DomainError, SchemaError, ValidationError
from kstab.kahler_models import (BumpedProjectiveModel, ModelSpec, OrbitPoint, fd_laplacian_values,
                                 fs_chart, group_flow, group_flow_numeric, hamiltonian_of,
                                 hamiltonian_values, laplacian_values, projective_model,
                                 scalar_curvature_numeric)

points = st.lists(st.floats(-2, 2, allow_nan=False), min_size=6, max_size=6).filter(
    lambda v: np.linalg.norm(v) > 0.1)


def _p2_point(v):
    return [[complex(v[0], v[1]), complex(v[2], v[3]), complex(v[4], v[5])]]


@given(points)
@settings(max_examples=25, deadline=None)
def test_fs_hamiltonians_are_laplace_eigenfunctions(v):
    model = projective_model([2], [1.5], group="full")
    p = model.point(_p2_point(v))
    assert np.allclose(laplacian_values(model, p), -3 / 1.5 * hamiltonian_values(model, p),
                       atol=1e-12)


def test_closed_form_laplacian_matches_finite_differences():
    model = projective_model([1, 2], [1.0, 2.0])
    p = model.point([[1, 0.3 + 0.2j], [0.5, 1, 0.7j]])
    fd = fd_laplacian_values(model, p)
    exact = laplacian_values(model, p)
    assert np.max(np.abs(fd - exact)) <= 1e-6 * np.max(np.abs(exact))


def test_scalar_curvature_in_chart():
    model = projective_model([2], [2.0])
    p = model.point([[1, 0, 0]])
    chart = fs_chart(model, p)
    s = scalar_curvature_numeric(chart, np.array([0.2, 0.1j]))
    assert abs(s - model.mean_scalar) < 1e-6 * model.mean_scalar


def test_flow_limit_on_p2():
    model = projective_model([2], [1.0], group="full")
    xi = None
    for k, g in enumerate(model.algebra.generators):
        if np.allclose(g[0], np.diag([1.0, -1.0, 0.0])):
            xi = np.eye(model.algebra.dim)[k]
    # diag(1, 0, -1) = diag(1,-1,0)/2 + sqrt(3)/2 * diag(1,1,-2)/sqrt(3)
    from kstab.action_algebra import element_coordinates
    xi = element_coordinates(model.algebra, [np.diag([1.0, 0.0, -1.0])])
    p = model.point([[1, 1, 1]])
    q, t, converged = group_flow_numeric(model, p, xi, t_end=-40)
    assert converged
    assert q.is_close(OrbitPoint.create([[1, 0, 0]], model.factors), 1e-9)


def test_weight_is_monotone_along_the_flow():
    model = projective_model([1, 2], [1.0, 2.0])
    p = model.point([[1, 0.7], [1, 0.8, 1.3]])
    xi = np.array([0.3, -0.5, 0.8])
    vals = [hamiltonian_of(model, xi, group_flow(model, p, xi, t)) for t in np.linspace(0, -8, 40)]
    assert np.all(np.diff(vals) >= -1e-12)


def test_model_round_trip(demos):
    for model in demos.values():
        again = ModelSpec.from_dict(json.loads(json.dumps(model.to_dict())))
        assert np.allclose(again.algebra.gram, model.algebra.gram)
        assert again.point().is_close(model.point())


def test_volume_and_scalar_closed_forms():
    model = projective_model([1, 2], [1.0, 2.0])
    assert model.m == 3
    assert model.mean_scalar == pytest.approx(2 / 1.0 + 6 / 2.0)
    # V = m! prod (2 pi a)^n / n!
    assert model.volume == pytest.approx(6 * (2 * np.pi) * (4 * np.pi) ** 2 / 2)


def test_schema_errors():
    with pytest.raises(SchemaError):
        ModelSpec.from_dict({"factors": [{"dim": 1}]})
    model = projective_model([1], [1.0])
    with pytest.raises(ValidationError):
        model.point([[0, 0]])
    with pytest.raises(ValidationError):
        model.point([[1, 0, 0]])


def test_bumped_model():
    flat = BumpedProjectiveModel.create(3, 1.0, 0.0)
    taus = np.linspace(0.05, 0.95, 7)
    assert np.allclose(flat.scalar(taus), flat.mean_scalar)
    bumped = BumpedProjectiveModel.create(3, 1.0, 0.3)
    assert not np.allclose(bumped.scalar(taus), bumped.mean_scalar)
    total = bumped.integrate_tau(bumped.scalar)
    assert total == pytest.approx(bumped.mean_scalar * bumped.volume, rel=1e-9)
    with pytest.raises(DomainError):
        BumpedProjectiveModel.create(3, 1.0, -5.0)
