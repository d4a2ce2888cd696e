import numpy as np
import pytest
from scipy.linalg import expm

from dobac.errors import ConfigError, DimensionMismatch
from dobac.plant import Signal
from dobac.reference import ReferenceConfig, r_dot_eval, r_eval, reference_deriv, tracking_error
from dobac.sim import rk4_step


@pytest.fixture
def ref():
    return ReferenceConfig(A_r=[[0, 1], [-1, -1]], b=[0, 1], Lambda_r=1.0, V_r=[1.0],
                           c_r=[1, 1], excitation=Signal.sinusoid(-1.0, 1.0))


def test_rejects_non_hurwitz():
    with pytest.raises(ConfigError):
        ReferenceConfig(A_r=[[0, 1], [1, -1]], b=[0, 1], Lambda_r=1.0, V_r=[])
    with pytest.raises(DimensionMismatch):
        ReferenceConfig(A_r=np.eye(3) * -1, b=[0, 1], Lambda_r=1.0, V_r=[])


def test_rejects_unstable_closed_reference():
    with pytest.raises(ConfigError):
        ReferenceConfig(A_r=[[0, 1], [-1, -1]], b=[0, 1], Lambda_r=1.0, V_r=[], c_r=[2, 2])


def test_reference_generates_sine(ref):
    # x1r'' = -sin t once the feedback cancels A_r, so x_r(0) = [0, 1] gives sin t
    y = np.array([0.0, 1.0])
    h = 1e-3
    for k in range(3000):
        y = rk4_step(k * h, y, lambda t, v: reference_deriv(v, t, ref), h)
    np.testing.assert_allclose(y, [np.sin(3.0), np.cos(3.0)], atol=1e-10)


def test_r_and_r_dot(ref):
    xr = np.array([0.2, -0.4])
    assert r_eval(xr, 0.5, ref) == pytest.approx(-0.2 - np.sin(0.5))
    h = 1e-6
    # r along the trajectory: finite difference in time
    fwd = r_eval(xr + h * reference_deriv(xr, 0.5, ref), 0.5 + h, ref)
    bwd = r_eval(xr - h * reference_deriv(xr, 0.5, ref), 0.5 - h, ref)
    assert r_dot_eval(xr, 0.5, ref) == pytest.approx((fwd - bwd) / (2 * h), rel=1e-6)


def test_external_signal_linear_flow():
    ref = ReferenceConfig(A_r=[[0, 1], [-2, -3]], b=[0, 1], Lambda_r=1.0, V_r=[],
                          r_kind="external-signal")
    y = np.array([1.0, 0.0])
    for k in range(1000):
        y = rk4_step(k * 1e-3, y, lambda t, v: reference_deriv(v, t, ref), 1e-3)
    np.testing.assert_allclose(y, expm(ref.A_r) @ [1.0, 0.0], atol=1e-12)


def test_tracking_error():
    np.testing.assert_array_equal(tracking_error([1, 2], [0.5, 3]), [0.5, -1])
    with pytest.raises(DimensionMismatch):
        tracking_error([1, 2], [1])
