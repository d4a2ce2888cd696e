"""Fixed-step hybrid integration of the closed loop.

Each step evaluates the rejection guard once at the step start, applies any
reset as a jump, then integrates with classical RK4 while the selected case
and the rate-clamp branch stay frozen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .adaptive import NotLyapunov, adaptation_deriv, control_law, lyapunov_Q, solve_matching
from .errors import Diverged, NonFiniteDerivative, OutsideSet, Unmatchable
from .observer import initial_z, recover_d_hat
from .plant import lumped_disturbance_truth
from .rejection import CASE_CODES, Case, RejectionMode, decide
from .runlog import RunLog, column_names


@dataclass
class ClosedLoopState:
    t: float
    x: np.ndarray
    x_r: np.ndarray
    k_x: np.ndarray
    k_r: float
    V: np.ndarray
    W: np.ndarray
    z_obs: np.ndarray
    u_drj: float

    def to_vector(self):
        return np.concatenate([self.x, self.x_r, self.k_x, [self.k_r], self.V, self.W,
                               self.z_obs, [self.u_drj]]).astype(float)

    @classmethod
    def from_vector(cls, t, y, n, m_V, m_W):
        i = 3 * n
        j = i + 1 + m_V
        return cls(t, y[:n], y[n:2 * n], y[2 * n:i], float(y[i]), y[i + 1:j],
                   y[j:j + m_W], y[j + m_W:j + m_W + n], float(y[-1]))


@dataclass
class StepResult:
    state: ClosedLoopState
    mode: Case
    diagnostics: dict = field(default_factory=dict)


def rk4_step(t, y, f, h):
    """One classical Runge-Kutta step of y' = f(t, y)."""
    k1 = _finite(f(t, y), t)
    k2 = _finite(f(t + 0.5 * h, y + 0.5 * h * k1), t)
    k3 = _finite(f(t + 0.5 * h, y + 0.5 * h * k2), t)
    k4 = _finite(f(t + h, y + h * k3), t)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _finite(k, t):
    if not np.all(np.isfinite(k)):
        raise NonFiniteDerivative(f"non-finite derivative near t={t:.6g}")
    return k


def _rk4_from_k1(t, y, k1, f, h):
    k2 = _finite(f(t + 0.5 * h, y + 0.5 * h * k1), t)
    k3 = _finite(f(t + 0.5 * h, y + 0.5 * h * k2), t)
    k4 = _finite(f(t + h, y + h * k3), t)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


_INTEGRATING = (Case.INTEGRATE, Case.RESET_TO_NEG_DHAT, Case.RESET_TO_ZERO)


class ClosedLoop:
    """Closed-loop vector field for one scenario, with ground truth for
    diagnostics."""

    def __init__(self, scenario):
        self.sc = sc = scenario
        p, ref = sc.plant, sc.reference
        self.n, self.m_V, self.m_W = p.n, p.basis_V.size, p.basis_W.size
        self.sign_Lambda = 1.0 if p.Lambda > 0 else -1.0
        self.columns = column_names(self.n, self.m_V, self.m_W)
        try:
            mg = solve_matching(p.A, ref.A_r, p.b, p.Lambda, ref.Lambda_r)
            self.k_x_star, self.k_r_star = mg.k_x_star, mg.k_r_star
        except Unmatchable:
            self.k_x_star, self.k_r_star = np.full(self.n, np.nan), math.nan
        self.bounds = analysis.ParamErrorBounds.from_sets(sc.sets)
        try:
            self.Q = lyapunov_Q(ref.A_r, sc.gains.P)
        except NotLyapunov:
            self.Q = None
        self._b_scale = 1.0 / (float(p.b @ p.b) * ref.Lambda_r)

    # -- state packing ----------------------------------------------------
    def initial_state(self):
        ic, sc = self.sc.initial, self.sc
        return ClosedLoopState(0.0, ic.x.copy(), ic.x_r.copy(), ic.k_x.copy(), ic.k_r,
                               ic.V.copy(), ic.W.copy(),
                               initial_z(ic.x, sc.observer, ic.d_u_hat), ic.u_drj)

    def unpack(self, y, t=0.0):
        return ClosedLoopState.from_vector(t, y, self.n, self.m_V, self.m_W)

    # -- vector field -----------------------------------------------------
    def d_hat(self, y, t):
        s = self.unpack(y, t)
        ref = self.sc.reference
        r = float(ref.c_r @ s.x_r) + ref.excitation(t)
        d_u_hat = s.z_obs + self.sc.observer.gain * s.x
        return recover_d_hat(d_u_hat, s, r, ref, self.sc.plant.basis_V, self.sc.plant.basis_W)

    def rates(self, y, t, case, branch=0, full=False):
        """Return (y', info). ``info`` is None unless ``full``."""
        sc = self.sc
        p, ref, obs, rej = sc.plant, sc.reference, sc.observer, sc.rejection
        s = self.unpack(y, t)
        x = s.x
        bV, bW = p.basis_V, p.basis_W
        phi_V, phi_W = bV(x), bW(x)
        r = float(ref.c_r @ s.x_r) + ref.excitation(t)
        xr_dot = ref.A_r @ s.x_r + ref.b * (ref.Lambda_r * r)
        l = obs.gain
        d_u_hat = s.z_obs + l * x
        d_hat = recover_d_hat(d_u_hat, s, r, ref, bV, bW, phi_V, phi_W)
        if case in _INTEGRATING:
            u_drj = s.u_drj
        elif case is Case.DIRECT:
            u_drj = -d_hat
        else:
            u_drj = 0.0
        u = control_law(s, r, u_drj, bV, bW, phi_V, phi_W)
        d = sc.disturbance(t)
        x_dot = p.A @ x + p.b * (p.Lambda * (float(p.V @ phi_V) + float(p.W @ phi_W) + u + d))
        adapt = adaptation_deriv(s, r, sc.gains, sc.sets, self.sign_Lambda, p.b, bV, bW,
                                 phi_V, phi_W)
        nominal = ref.A_r @ x + ref.b * (ref.Lambda_r * (float(ref.V_r @ phi_V) + u))
        x_dot_star = nominal + d_u_hat
        z_dot = -l * x_dot_star
        need_star = full or (case is Case.INTEGRATE and branch == 0)
        d_hat_dot_star = phi = math.nan
        if need_star:
            r_dot = float(ref.c_r @ xr_dot) + ref.excitation.derivative(t)
            d_u_hat_dot = z_dot + l * x_dot
            dk_x, dk_r, dV, dW = adapt
            param_part = float(dk_x @ x) + dk_r * r - float(dV @ phi_V) - float(dW @ phi_W)
            gain_row = s.k_x
            if self.m_V:
                gain_row = gain_row - (s.V - ref.V_r) @ bV.jacobian(x)
            if self.m_W:
                gain_row = gain_row - s.W @ bW.jacobian(x)
            common = (self._b_scale * float(p.b @ d_u_hat_dot) + param_part
                      + (s.k_r - 1.0) * r_dot)
            d_hat_dot_star = common + float(gain_row @ x_dot_star)
        if case is Case.INTEGRATE:
            if branch:
                u_dot = branch * rej.f_bar
            else:
                phi = -rej.k_eta * (u_drj + d_hat) - d_hat_dot_star
                u_dot = min(max(phi, -rej.f_bar), rej.f_bar)
        else:
            u_dot = 0.0
        dk_x, dk_r, dV, dW = adapt
        deriv = np.concatenate([x_dot, xr_dot, dk_x, [dk_r], dV, dW, z_dot, [u_dot]])
        if not full:
            return deriv, None
        if case is Case.INTEGRATE and branch:
            phi = -rej.k_eta * (u_drj + d_hat) - d_hat_dot_star
        info = dict(s=s, r=r, r_dot=r_dot, u=u, u_drj=u_drj, d=d, x_dot=x_dot,
                    xr_dot=xr_dot, d_u_hat=d_u_hat, d_hat=d_hat, x_dot_star=x_dot_star,
                    d_hat_dot_star=d_hat_dot_star,
                    d_hat_dot=common + float(gain_row @ x_dot),
                    gain_row=gain_row, phi_drj=phi, f_drj=u_dot, phi_V=phi_V, phi_W=phi_W,
                    nominal=nominal)
        return deriv, info

    # -- one hybrid step --------------------------------------------------
    def decide_and_eval(self, y, t):
        """Evaluate the guard at (t, y). Returns (y_after_jump, decision, k1, info)."""
        rej = self.sc.rejection
        if rej.mode is RejectionMode.INTEGRATING and abs(y[-1]) < rej.u_bar:
            k1, info = self.rates(y, t, Case.INTEGRATE, 0, full=True)
            dec = decide(y[-1], info["d_hat"], info["d_hat_dot_star"], rej)
            if dec.saturated:
                k1 = k1.copy()
                k1[-1] = dec.saturated * rej.f_bar
                info["f_drj"] = k1[-1]
            return y, dec, k1, info
        dec = decide(float(y[-1]), self.d_hat(y, t), 0.0, rej)
        if dec.case is not Case.INTEGRATE and float(y[-1]) != dec.u_drj:
            y = y.copy()
            y[-1] = dec.u_drj
        if dec.case in (Case.DIRECT, Case.DIRECT_BLOCKED, Case.OFF):
            # algebraic u_drj: keep the state slot at zero
            if y[-1] != 0.0:
                y = y.copy()
                y[-1] = 0.0
        k1, info = self.rates(y, t, dec.case, 0, full=True)
        return y, dec, k1, info

    def step(self, y, t, h):
        y, dec, k1, info = self.decide_and_eval(y, t)
        case, branch = dec.case, dec.saturated
        f = lambda tt, yy: self.rates(yy, tt, case, branch)[0]
        _finite(k1, t)
        y_next = _rk4_from_k1(t, y, k1, f, h)
        return y, y_next, dec, info

    # -- diagnostics ------------------------------------------------------
    def row(self, t, dec, info):
        sc, p, ref = self.sc, self.sc.plant, self.sc.reference
        s = info["s"]
        x, x_r = s.x, s.x_r
        e = x - x_r
        u, d, r = info["u"], info["d"], info["r"]
        du = lumped_disturbance_truth(x, u, d, p, ref)
        edu = info["d_u_hat"] - du
        d_hat = info["d_hat"]
        e_d = d_hat - d
        eta = info["u_drj"] + d_hat
        phi_V, phi_W = info["phi_V"], info["phi_W"]
        k_err = s.k_x - self.k_x_star
        kr_err = s.k_r - self.k_r_star
        V_err, W_err = s.V - p.V, s.W - p.W
        u_tilde = float(k_err @ x) + kr_err * r - float(V_err @ phi_V) - float(W_err @ phi_W)
        lyap = analysis.lyapunov_V(e, k_err, kr_err, V_err, W_err, sc.gains, p.Lambda)
        beta = analysis.beta_adp(x, r, self.bounds, phi_V, phi_W)
        sets = sc.sets
        f_V = sets.V.f(s.V) if self.m_V else math.nan
        f_W = sets.W.f(s.W) if self.m_W else math.nan
        decomp = float(np.abs(info["x_dot"] - (info["nominal"] + du)).max())
        err_dyn = float(np.abs(p.b * (p.Lambda * e_d) - p.b * (p.Lambda * u_tilde) - edu
                            - p.b * ((p.Lambda - ref.Lambda_r) * eta)).max())
        return ([t], x, x_r, e, [math.sqrt(float(e @ e))], s.k_x, [s.k_r], s.V, s.W,
                [r, u, info["u_drj"], CASE_CODES[dec.case], d], du, info["d_u_hat"], edu,
                [math.sqrt(float(edu @ edu)), d_hat, e_d, eta, info["phi_drj"], info["f_drj"],
                 info["d_hat_dot_star"], info["d_hat_dot"], float(info["gain_row"] @ edu),
                 u_tilde, lyap, beta, sets.x.f(s.k_x), sets.r.f([s.k_r]), f_V, f_W, decomp, err_dyn])

    def meta(self):
        sc = self.sc
        return {
            "scenario": sc.name,
            "h": sc.h,
            "t_end": sc.t_end,
            "decimation": int(sc.decimation),
            "rejection_mode": sc.rejection.mode.value,
            "k_eta": sc.rejection.k_eta,
            "u_bar": sc.rejection.u_bar,
            "f_bar": sc.rejection.f_bar,
            "observer_gain": sc.observer.gain,
            "n": self.n, "m_V": self.m_V, "m_W": self.m_W,
            "case_codes": {c.value: i for c, i in CASE_CODES.items()},
        }


_LOOP_CACHE = {}


def _loop_for(scenario):
    key = id(scenario)
    cached = _LOOP_CACHE.get(key)
    if cached is None or cached.sc is not scenario:
        cached = ClosedLoop(scenario)
        _LOOP_CACHE.clear()
        _LOOP_CACHE[key] = cached
    return cached


def advance(state, scenario, h):
    """One hybrid step from ``state``; diagnostics describe the step start."""
    loop = _loop_for(scenario)
    y0 = state.to_vector()
    y_jump, y_next, dec, info = loop.step(y0, state.t, h)
    diag = dict(eta=dec.eta if dec.case is not Case.INTEGRATE else info["u_drj"] + info["d_hat"],
                d_hat=info["d_hat"], d_u_hat=info["d_u_hat"], f_drj=info["f_drj"],
                phi_drj=info["phi_drj"], u_drj_applied=info["u_drj"], decision=dec)
    return StepResult(loop.unpack(y_next, state.t + h), dec.case, diag)


def simulate(scenario, progress=None):
    """Run ``scenario`` from t = 0 to t_end and return the sampled RunLog."""
    loop = ClosedLoop(scenario)
    h, N, dec_every = scenario.h, scenario.n_steps, int(scenario.decimation)
    guard, n = scenario.guard, loop.n
    y = loop.initial_state().to_vector()
    rows = []
    for k in range(N + 1):
        t = k * h
        if k == N:
            y, dec, _, info = loop.decide_and_eval(y, t)
            rows.append(np.concatenate(loop.row(t, dec, info)))
            break
        try:
            y_applied, y_next, dec, info = loop.step(y, t, h)
        except OutsideSet as exc:
            # an RK stage overshot a projection set: the step size can no
            # longer resolve the dynamics
            raise Diverged(t, math.inf, guard, f"integration unstable at t={t:.6g}: {exc}") from None
        if k % dec_every == 0:
            rows.append(np.concatenate(loop.row(t, dec, info)))
        if not np.all(np.isfinite(y_next)):
            raise NonFiniteDerivative(f"non-finite state at t={t + h:.6g}")
        norm = float(np.max(np.abs(y_next[:n])))
        if norm > guard:
            raise Diverged(t + h, norm, guard)
        y = y_next
        if progress is not None and k % 5000 == 0:
            progress(t)
    data = np.vstack(rows)
    return RunLog({c: data[:, i] for i, c in enumerate(loop.columns)}, loop.meta())
