import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dobac.adaptive import (AdaptationGains, ProjectionSet, ProjectionSets, adaptation_deriv,
                            control_law, lyapunov_Q, projection, regressors, solve_matching)
from dobac.errors import ConfigError, NotLyapunov, OutsideSet, Unmatchable
from dobac.plant import Basis
from dobac.sim import ClosedLoopState

A_R = np.array([[0.0, 1.0], [-1.0, -1.0]])
P = np.array([[1.5, 0.5], [0.5, 1.0]])
A = np.array([[0.0, 1.0], [-0.5, -0.5]])
B = np.array([0.0, 1.0])

vec2 = arrays(float, 2, elements=st.floats(-5, 5))


def state(x=(0.3, -0.2), x_r=(0.1, 0.0), k_x=(-0.2, -0.3), k_r=0.9, V=(0.5,)):
    return ClosedLoopState(0.0, np.array(x, float), np.array(x_r, float), np.array(k_x, float),
                           k_r, np.array(V, float), np.zeros(0), np.zeros(2), 0.0)


def test_lyapunov_Q_identity():
    Q = lyapunov_Q(A_R, P)
    np.testing.assert_allclose(Q, np.eye(2), atol=1e-12)
    assert np.linalg.eigvalsh(Q).min() == pytest.approx(1.0, abs=1e-12)


def test_lyapunov_rejects_bad_P():
    with pytest.raises(ConfigError):
        lyapunov_Q(A_R, [[1, 2], [2, 1]])
    with pytest.raises(NotLyapunov):
        lyapunov_Q(A_R, [[10, 0], [0, 0.01]])


def test_matching_conditions():
    m = solve_matching(A, A_R, B, 1.2, 1.0)
    np.testing.assert_allclose(m.k_x_star, [-0.5 / 1.2, -0.5 / 1.2], atol=1e-12)
    assert m.k_r_star == pytest.approx(1 / 1.2, abs=1e-12)
    np.testing.assert_allclose(A + 1.2 * np.outer(B, m.k_x_star), A_R, atol=1e-12)
    np.testing.assert_allclose(B * 1.2 * m.k_r_star, B * 1.0, atol=1e-12)


def test_matching_trivial_and_unmatchable():
    m = solve_matching(A_R, A_R, B, 1.0, 1.0)
    np.testing.assert_array_equal(m.k_x_star, [0, 0])
    assert m.k_r_star == 1.0
    with pytest.raises(Unmatchable):
        solve_matching(A_R + np.array([[0, 0.1], [0, 0]]), A_R, B, 1.0, 1.0)


def test_from_interval_contains_box_with_margin():
    s = ProjectionSet.from_interval([1 / 1.4], [1.0])
    c, half = s.center[0], 0.5 * (1 - 1 / 1.4)
    assert s.f([c + half + 0.1]) == pytest.approx(1.0)
    assert s.f([c]) == -1.0
    v = ProjectionSet.from_interval([-1.5 / 1.4] * 2, [0.5, 0.5])
    corner = v.center + v.half_width
    assert v.f(corner) < 1.0


def test_projection_interior_and_inward():
    s = ProjectionSet([0.0], [2.0])
    y = np.array([3.0])
    np.testing.assert_array_equal(projection(np.array([0.2]), y, s), y)  # f < 0
    np.testing.assert_array_equal(projection(np.array([0.9]), -y, s), -y)  # inward


def test_projection_removes_radial_component_on_boundary():
    s = ProjectionSet([0.0, 0.0], [1.0, 4.0])
    theta = np.array([np.sqrt(2) * np.cos(0.3), np.sqrt(2) * np.sin(0.3) / 2])
    assert s.f(theta) == pytest.approx(1.0)
    out = projection(theta, np.array([1.0, 1.0]), s)
    assert s.grad(theta) @ out == pytest.approx(0.0, abs=1e-12)


def test_projection_outside_raises():
    s = ProjectionSet([0.0], [1.0])
    with pytest.raises(OutsideSet):
        projection(np.array([2.0]), np.array([1.0]), s)


@settings(max_examples=300, deadline=None)
@given(vec2, vec2)
def test_projection_properties(theta, y):
    s = ProjectionSet([0.5, -0.5], [0.5, 2.0])
    assume(s.f(theta) <= 1.0)
    out = projection(theta, y, s)
    g = s.grad(theta)
    # never pushes further outward than the raw direction
    assert g @ out <= max(g @ y, 0.0) + 1e-9
    # the well-known ( theta - theta* )^T (proj - y) <= 0 for theta* in the set
    assert (theta - s.center) @ (out - y) <= 1e-9
    if s.f(theta) >= 1.0 - 1e-12 and g @ y > 0:
        assert g @ out == pytest.approx(0.0, abs=1e-9 * (1 + np.abs(y).max()))


def test_regressors_sign_convention():
    s = state()
    e = s.x - s.x_r
    ePb = e @ P @ B
    v_x, v_r, v_V, v_W = regressors(s, 0.7, P, B, 1.0, np.array([s.x[0] ** 3]), np.zeros(0))
    np.testing.assert_allclose(v_x, -s.x * ePb)
    assert v_r == pytest.approx(-0.7 * ePb)
    np.testing.assert_allclose(v_V, [s.x[0] ** 3 * ePb])


def test_adaptation_zero_error_is_zero():
    s = state(x=(0.3, -0.2), x_r=(0.3, -0.2))
    gains = AdaptationGains(np.eye(2), 1.0, np.eye(1), np.zeros((0, 0)), P)
    sets = ProjectionSets(ProjectionSet([0, 0], [0.1, 0.1]), ProjectionSet([1.0], [1.0]),
                          ProjectionSet([0.5], [1.0]))
    out = adaptation_deriv(s, 0.4, gains, sets, 1.0, B, Basis.parse("x1^3", 2), Basis.zero(2))
    for block in out:
        np.testing.assert_array_equal(block, 0)


def test_control_law():
    s = state()
    u = control_law(s, 0.7, 0.25, Basis.parse("x1^3", 2), Basis.zero(2))
    expected = -0.2 * 0.3 + -0.3 * -0.2 + 0.9 * 0.7 - 0.5 * 0.3 ** 3 + 0.25
    assert u == pytest.approx(expected)


def test_gains_validation():
    with pytest.raises(ConfigError):
        AdaptationGains(-np.eye(2), 1.0, np.eye(1), np.zeros((0, 0)), P)
    with pytest.raises(ConfigError):
        AdaptationGains(np.eye(2), 0.0, np.eye(1), np.zeros((0, 0)), P)
