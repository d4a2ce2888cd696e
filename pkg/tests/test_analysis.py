import numpy as np
import pytest

from dobac import analysis
from dobac.adaptive import AdaptationGains, ProjectionSet, ProjectionSets
from dobac.errors import ConfigError, WindowOutOfRange

P = np.array([[1.5, 0.5], [0.5, 1.0]])
CONSTS = analysis.BoundConstants(1.2, 1.0, np.array([0.0, 1.0]), P, np.eye(2))


def test_constants():
    assert CONSTS.lambda_min_Q == pytest.approx(1.0)
    assert CONSTS.LPb_norm == pytest.approx(1.2 * np.hypot(0.5, 1.0))
    with pytest.raises(ConfigError):
        analysis.BoundConstants(1.0, 1.0, np.array([0.0, 1.0]), P, -np.eye(2))


def test_param_bounds_scalar_set():
    s = ProjectionSet.from_interval([1 / 1.4], [1.0])
    half = 0.5 * (1 - 1 / 1.4)
    assert s.error_bound() == pytest.approx(2 * half + 0.1)


def test_beta_adp_by_hand():
    b = analysis.ParamErrorBounds(2.0, 0.5, 1.5, 0.0)
    x = np.array([3.0, 4.0])
    assert analysis.beta_adp(x, -2.0, b, np.array([27.0]), np.zeros(0)) == pytest.approx(
        2.0 * 5 + 0.5 * 2 + 1.5 * 27)


def test_b_ed_by_hand():
    assert analysis.b_ed(1.0, 0.2, 0.3, CONSTS) == pytest.approx(1.0 + (0.2 + 0.2 * 0.3) / 1.2)


def test_epsilon_r():
    val = analysis.epsilon_r(0.4, 2.0, 1.0, CONSTS)
    assert val == pytest.approx(2.0 * (0.2 + 1.0) * CONSTS.LPb_norm)
    with pytest.raises(ConfigError):
        analysis.epsilon_r(0.4, 0.0, 1.0, CONSTS)


def test_epsilon_r_monotone_in_k_eta():
    vals = [analysis.epsilon_r(0.4, k, 1.0, CONSTS) for k in (0.1, 1, 10, 100)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_b_e_dhat_dot_zero_without_estimate_error():
    b = analysis.ParamErrorBounds(1.0, 1.0, 1.0, 0.0)
    assert analysis.b_e_dhat_dot(b, 0.0, CONSTS, 0.6, 0.4, 0.0, 3.0, 0.0) == 0.0
    assert analysis.b_e_dhat_dot(b, 0.1, CONSTS, 0.6, 0.4, 0.0, 3.0, 0.0) == pytest.approx(
        0.1 * (1.6 + 1.4 * 3.0))


def test_lyapunov_V_by_hand():
    gains = AdaptationGains(np.eye(2) * 2, 4.0, np.eye(1), np.zeros((0, 0)), P)
    e = np.array([1.0, -1.0])
    v = analysis.lyapunov_V(e, np.array([1.0, 1.0]), 2.0, np.array([1.0]), np.zeros(0), gains, 1.2)
    assert v == pytest.approx(e @ P @ e + 1.2 * (1.0 + 1.0 + 1.0))


def test_window_and_statistics():
    t = np.linspace(0, 10, 101)
    v = np.where(t < 5, 10.0, 1.0)
    m = analysis.window_mask(t, (6, 10))
    assert analysis.rms(v, m) == 1.0 and analysis.sup_abs(-v, m) == 1.0
    assert analysis.settling_time(t, v, (8, 10)) == pytest.approx(5.0)
    with pytest.raises(WindowOutOfRange):
        analysis.window_mask(t, (5, 11))


def test_sup_rate_excludes_flagged():
    t = np.arange(5) * 0.1
    v = np.array([0.0, 0.1, 5.0, 5.1, 5.2])
    assert analysis.sup_rate(t, v) == pytest.approx(49.0)
    assert analysis.sup_rate(t, v, exclude=[0, 0, 1, 0, 0]) == pytest.approx(1.0)


def test_from_sets():
    sets = ProjectionSets(ProjectionSet.from_interval([-1, -1], [1, 1]),
                          ProjectionSet.from_interval([0.5], [1.0]))
    b = analysis.ParamErrorBounds.from_sets(sets)
    assert b.V == 0.0 and b.W == 0.0
    assert b.kx == pytest.approx(np.sqrt(2) * 1.1 + np.sqrt(2))
