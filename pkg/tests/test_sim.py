import math

import numpy as np
import pytest
from scipy.linalg import expm

from dobac.errors import Diverged, NonFiniteDerivative
from dobac.rejection import CASE_CODES, Case
from dobac.scenario import load_scenario
from dobac.sim import ClosedLoop, ClosedLoopState, advance, rk4_step, simulate

LIN = np.array([[0.0, 1.0], [-4.0, -0.4]])


def integrate(f, y0, t_end, h):
    y = np.array(y0, float)
    n = int(round(t_end / h))
    for k in range(n):
        y = rk4_step(k * h, y, f, h)
    return y


def test_scalar_decay():
    y = integrate(lambda t, v: -v, [1.0], 1.0, 1e-3)
    assert y[0] == pytest.approx(math.exp(-1), abs=1e-12)


def test_fourth_order_convergence():
    exact = expm(LIN * 5.0) @ [1.0, 0.0]
    errs = [np.abs(integrate(lambda t, v: LIN @ v, [1.0, 0.0], 5.0, h) - exact).max()
            for h in (0.1, 0.05, 0.025)]
    for coarse, fine in zip(errs, errs[1:]):
        assert coarse / fine >= 2 ** 3.9


def test_nonfinite_derivative():
    with pytest.raises(NonFiniteDerivative):
        rk4_step(0.0, np.array([1.0]), lambda t, v: np.array([np.nan]), 0.1)


def short(*overrides, t_end=2.0):
    return load_scenario("msd-cubic-paper", [f"sim.t_end={t_end}", *overrides])


def test_state_vector_round_trip():
    loop = ClosedLoop(short())
    s = loop.initial_state()
    back = ClosedLoopState.from_vector(0.0, s.to_vector(), 2, 1, 0)
    np.testing.assert_array_equal(back.to_vector(), s.to_vector())


def test_determinism():
    a, b = simulate(short()), simulate(short())
    assert a.equals(b)


def test_advance_matches_simulate():
    sc = short(t_end=0.05)
    log = simulate(sc)
    state = ClosedLoop(sc).initial_state()
    for _ in range(sc.n_steps):
        state = advance(state, sc, sc.h).state
    np.testing.assert_allclose(state.x, [log["x1"][-1], log["x2"][-1]], rtol=0, atol=1e-15)
    assert state.u_drj == pytest.approx(log["u_drj"][-1], abs=1e-15)


def test_initial_row():
    log = simulate(short(t_end=0.01))
    assert log.t[0] == 0.0 and len(log) == 11
    assert log["du_hat1"][0] == 0.0 and log["du_hat2"][0] == 0.0
    assert log["x1"][0] == 0.0 and log["x2"][0] == 1.0


def test_decimation():
    full = simulate(short(t_end=0.1))
    dec = simulate(short("sim.decimation=10", t_end=0.1))
    np.testing.assert_array_equal(dec.t, full.t[::10])
    np.testing.assert_array_equal(dec["x1"], full["x1"][::10])


@pytest.mark.parametrize("mode,cases", [
    ("off", {Case.OFF}),
    ("direct", {Case.DIRECT, Case.DIRECT_BLOCKED}),
    ("integrating", {Case.INTEGRATE, Case.RESET_TO_NEG_DHAT, Case.RESET_TO_ZERO}),
])
def test_mode_soundness(mode, cases):
    log = simulate(short(f"rejection.mode={mode}"))
    codes = {CASE_CODES[c] for c in cases}
    assert set(np.unique(log["mode"]).astype(int)) <= codes


def test_guard_held_at_step_start():
    # start saturated so the first step must reset
    log = simulate(short("initial.u_drj=10.0", t_end=0.5))
    assert log["mode"][0] == CASE_CODES[Case.RESET_TO_NEG_DHAT]
    assert log["u_drj"][0] == pytest.approx(-log["d_hat"][0])
    integ = log["mode"] == CASE_CODES[Case.INTEGRATE]
    assert np.all(np.abs(log["u_drj"][integ]) < 10.0)


def test_rate_limit_holds_every_step():
    log = simulate(short("rejection.f_bar=0.5", t_end=3.0))
    rate = np.abs(np.diff(log["u_drj"])) / np.diff(log.t)
    assert rate.max() <= 0.5 + 1e-9


def test_divergence_guard():
    with pytest.raises(Diverged) as err:
        simulate(short("sim.guard=0.5"))
    assert err.value.guard == 0.5 and err.value.t == pytest.approx(1e-3)


def test_unresolvable_step_reported_as_divergence():
    with pytest.raises(Diverged):
        simulate(short("initial.x=[30, 0]", "sim.h=0.01", t_end=1.0))


def test_diagnostic_identities_short_run():
    log = simulate(short())
    assert log["decomp_resid"].max() < 1e-12
    assert log["error_dyn_resid"].max() < 1e-9
