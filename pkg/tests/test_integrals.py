import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from layerpot import parse_density
from layerpot.integrals import (CauchyEvaluator, NonConvergenceError, boundary_limit,
                                cauchy_integral, criterion_functional, criterion_sweep,
                                double_layer_potential, inward_normal, pv_reduced_singular,
                                sokhotski_values)

RE = parse_density("re")
ONE = parse_density("const:1")


def re_t_oracle(z):
    # Cauchy integral of Re t over the unit circle
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = z / 2
    far = np.abs(z) >= 1
    out[far] = -1 / (2 * z[far])
    return out if out.size > 1 else out[0]


def test_constant_density_indicator(circle):
    z = np.array([0.0, 0.3 + 0.2j, -0.9j, 1.5, 3 - 2j])
    v = cauchy_integral(circle, ONE, z)
    assert np.allclose(v, [1, 1, 1, 0, 0], atol=1e-10)
    assert double_layer_potential(circle, ONE, 0.2j) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 0.97), st.floats(0, 2 * np.pi))
def test_re_t_interior_oracle(rho, phase):
    z = rho * np.exp(1j * phase)
    assert abs(cauchy_integral(circle_curve(), RE, z) - re_t_oracle(z)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(st.floats(1.03, 10), st.floats(0, 2 * np.pi))
def test_re_t_exterior_oracle(rho, phase):
    z = rho * np.exp(1j * phase)
    assert abs(cauchy_integral(circle_curve(), RE, z) - re_t_oracle(z)) < 1e-8


_CIRCLE = []


def circle_curve():
    if not _CIRCLE:
        from layerpot import make_curve
        _CIRCLE.append(make_curve("circle"))
    return _CIRCLE[0]


def test_error_estimate_is_small(circle):
    ev = CauchyEvaluator(circle, RE)
    v, err = ev.with_error(np.array([0.5, 0.99j]))
    assert np.all(err < 1e-8)
    assert np.allclose(v, re_t_oracle([0.5, 0.99j]), atol=1e-8)


def test_principal_value_on_circle(circle):
    pv = pv_reduced_singular(circle, RE, 1.0)
    assert pv.converged
    assert pv.value == pytest.approx(-np.pi * 1j, abs=1e-6)
    assert pv_reduced_singular(circle, ONE, 1.0).value == 0


def test_sokhotski_jump(circle):
    sv = sokhotski_values(circle, RE, 1.0)
    assert sv.re_plus == pytest.approx(0.5, abs=1e-6)
    assert sv.re_minus == pytest.approx(-0.5, abs=1e-6)
    assert sv.jump == pytest.approx(sv.g_xi, abs=1e-12)
    assert not sv.real_only and sv.plus == pytest.approx(0.5, abs=1e-6)


def test_schedule_validation(circle):
    with pytest.raises(ValueError):
        pv_reduced_singular(circle, RE, 1.0, schedule=[0.1])
    with pytest.raises(ValueError):
        pv_reduced_singular(circle, RE, 1.0, schedule=[0.1, 0.2])
    with pytest.raises(ValueError):
        boundary_limit(circle, RE, 1.0, side="x")
    with pytest.raises(ValueError):
        boundary_limit(circle, RE, 0.5)


def test_nonconvergence_is_reported(circle):
    with pytest.raises(NonConvergenceError):
        sokhotski_values(circle, RE, 1.0, schedule=[0.5, 0.25], tol=1e-12)


def test_inward_normal_points_inside(circle):
    n = inward_normal(circle, 0)
    assert n == pytest.approx(-circle.vertices[0] / abs(circle.vertices[0]), abs=1e-6)


@pytest.mark.parametrize("side,expect", [("+", 0.5), ("-", -0.5)])
def test_boundary_limits_match_formulas(circle, side, expect):
    res = boundary_limit(circle, RE, 1.0, side=side)
    assert res.converged
    assert res.limit == pytest.approx(expect, abs=1e-6)
    assert res.discrepancy < 1e-5


def test_criterion_functional_constant_density_is_zero(circle):
    xi = circle.vertices[::512]
    assert criterion_functional(circle, ONE, 0.25, xi) == 0
    res = criterion_sweep(circle, ONE, [0.5, 0.25], xi)
    assert [r.value for r in res] == [0.0, 0.0]


def test_criterion_functional_decreases_for_smooth_density(circle):
    xi = circle.vertices[::256]
    vals = [r.value for r in criterion_sweep(circle, RE, [0.5, 0.25, 0.125, 0.0625], xi)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        criterion_functional(circle, RE, 0.25, xi, delta_grid=[0.3])
