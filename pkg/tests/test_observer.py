import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dobac.errors import ConfigError, DimensionMismatch
from dobac.observer import (ObserverConfig, d_hat_rate, d_u_hat_of, e_dhatdot_closed_form,
                            initial_z, nominal_model, observer_deriv, observer_output_rate,
                            recover_d_hat, x_dot_star)
from dobac.plant import PlantParams, lumped_disturbance_truth, plant_deriv
from dobac.reference import ReferenceConfig
from dobac.scenario import msd_cubic_plant
from dobac.sim import ClosedLoopState

REF = ReferenceConfig(A_r=[[0, 1], [-1, -1]], b=[0, 1], Lambda_r=1.0, V_r=[1.0])
PLANT = msd_cubic_plant(0.5, 0.5, 0.5, 1.2)
BV, BW = PLANT.basis_V, PLANT.basis_W
CFG = ObserverConfig(50.0)


def state(x, k_x=(-0.4, -0.4), k_r=0.8, V=(0.6,)):
    return ClosedLoopState(0.0, np.asarray(x, float), np.zeros(2), np.array(k_x, float), k_r,
                           np.array(V, float), np.zeros(0), np.zeros(2), 0.0)


def test_initial_z_zero_estimate():
    x0 = np.array([0.0, 1.0])
    z0 = initial_z(x0, CFG)
    np.testing.assert_allclose(z0, [0.0, -50.0])
    np.testing.assert_array_equal(d_u_hat_of(z0, x0, CFG), [0, 0])


def test_estimate_rate_is_first_order_filter():
    x, u, d = np.array([0.4, -0.3]), 0.7, 1.1
    z = np.array([0.2, -5.0])
    z_dot, d_u_hat = observer_deriv(z, x, u, CFG, REF, BV)
    x_dot = plant_deriv(x, u, d, PLANT)
    du = lumped_disturbance_truth(x, u, d, PLANT, REF)
    np.testing.assert_allclose(observer_output_rate(z_dot, x_dot, CFG), 50.0 * (du - d_u_hat),
                               atol=1e-12)


def test_x_dot_star_uses_estimate():
    s = state([0.5, 0.2])
    d_u_hat = np.array([0.0, 0.3])
    np.testing.assert_allclose(x_dot_star(s, 0.1, d_u_hat, REF, BV),
                               nominal_model(s.x, 0.1, REF, BV(s.x)) + d_u_hat)
    with pytest.raises(DimensionMismatch):
        x_dot_star(s, 0.1, np.zeros(3), REF, BV)


def test_recover_d_hat_by_hand():
    x, r, d = np.array([0.3, -0.6]), 0.45, 2.2
    s = state(x)
    phi = x[0] ** 3
    u = float(s.k_x @ x) + s.k_r * r - s.V[0] * phi
    du = lumped_disturbance_truth(x, u, d, PLANT, REF)
    lam, V = 1.2, PLANT.V[0]
    b_part = (0.5 * x[0] + 0.5 * x[1] + (lam * V - 1.0) * phi + (lam - 1.0) * u + lam * d)
    expected = b_part + float(s.k_x @ x) + (s.k_r - 1) * r - (s.V[0] - 1.0) * phi
    assert recover_d_hat(du, s, r, REF, BV, BW) == pytest.approx(expected, abs=1e-12)


def test_recover_d_hat_ideal_case():
    # exact model, exact estimate, ideal gains: the recovered value is d itself
    p = PlantParams(REF.A_r, REF.b, 1.0, [1.0], [], BV, BW)
    x, r, d = np.array([0.3, -0.6]), 0.45, -1.3
    s = state(x, k_x=(0.0, 0.0), k_r=1.0, V=(1.0,))
    u = float(s.k_x @ x) + s.k_r * r - s.V[0] * x[0] ** 3
    du = lumped_disturbance_truth(x, u, d, p, REF)
    assert recover_d_hat(du, s, r, REF, BV, BW) == pytest.approx(d, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-3, 3), st.floats(-3, 3), st.floats(-1, 1))
def test_rate_error_is_linear_in_estimate_error(x1, x2, e1, e2, r):
    s = state([x1, x2])
    adapt = (np.array([0.1, -0.2]), 0.05, np.array([0.3]), np.zeros(0))
    d_u_hat_dot = np.array([0.0, 0.7])
    base = np.array([0.2, -0.1])
    e = np.array([e1, e2])
    exact = d_hat_rate(s, r, 0.3, d_u_hat_dot, adapt, base, REF, BV, BW)
    star = d_hat_rate(s, r, 0.3, d_u_hat_dot, adapt, base + e, REF, BV, BW)
    assert star - exact == pytest.approx(e_dhatdot_closed_form(s, e, REF, BV, BW), abs=1e-9)


def test_d_hat_rate_matches_finite_difference():
    # move x, k's and d_u_hat along straight lines and difference recover_d_hat
    x0, xd = np.array([0.4, -0.2]), np.array([0.3, 0.5])
    k0, kd = np.array([-0.3, -0.5]), np.array([0.02, -0.01])
    du0, dud = np.array([0.1, 0.8]), np.array([0.0, -0.4])
    r0, rd = 0.2, 0.9

    def at(t):
        s = state(x0 + t * xd, k_x=k0 + t * kd, k_r=0.8 + 0.03 * t, V=(0.6 - 0.05 * t,))
        return recover_d_hat(du0 + t * dud, s, r0 + t * rd, REF, BV, BW)

    h = 1e-6
    fd = (at(h) - at(-h)) / (2 * h)
    rate = d_hat_rate(state(x0, k_x=k0, V=(0.6,)), r0, rd, dud,
                      (kd, 0.03, np.array([-0.05]), np.zeros(0)), xd, REF, BV, BW)
    assert rate == pytest.approx(fd, rel=1e-7)


def test_config_validation():
    with pytest.raises(ConfigError):
        ObserverConfig(0.0)
    with pytest.raises(ConfigError):
        ObserverConfig(10.0, "output-only")


def test_dimension_check():
    with pytest.raises(DimensionMismatch):
        observer_deriv(np.zeros(3), np.zeros(2), 0.0, CFG, REF, BV)
