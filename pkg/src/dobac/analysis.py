"""Theoretical bounds and run statistics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, WindowOutOfRange
from .rejection import CASE_CODES, Case


@dataclass(frozen=True)
class ParamErrorBounds:
    kx: float
    kr: float
    V: float
    W: float

    @classmethod
    def from_sets(cls, sets):
        return cls(sets.x.error_bound(), sets.r.error_bound(),
                   sets.V.error_bound() if sets.V is not None else 0.0,
                   sets.W.error_bound() if sets.W is not None else 0.0)


@dataclass(frozen=True)
class BoundConstants:
    Lambda: float
    Lambda_r: float
    b: np.ndarray
    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        if np.linalg.eigvalsh(self.Q).min() <= 0:
            raise ConfigError("lambda_min(Q) must be positive")

    @property
    def lambda_min_Q(self):
        return float(np.linalg.eigvalsh(self.Q).min())

    @property
    def LPb_norm(self):
        return float(np.linalg.norm(self.Lambda * (self.P @ self.b)))


def beta_adp(x, r, bounds, phi_V, phi_W):
    """Upper bound on |u_tilde_adp| given parameter-error bounds."""
    return (bounds.kx * float(np.linalg.norm(x)) + bounds.kr * abs(r)
            + bounds.V * float(np.linalg.norm(phi_V)) + bounds.W * float(np.linalg.norm(phi_W)))


def b_ed(beta_adp_val, eps_du, eps_eta, consts):
    b = consts.b
    return beta_adp_val + (float(np.linalg.norm(b)) * eps_du
                           + abs(consts.Lambda - consts.Lambda_r) * eps_eta) / (
        abs(consts.Lambda) * float(b @ b))


def b_e_dhat_dot(bounds, eps_du, consts, k_x_star_norm, V_dev_norm, W_norm, jac_V_norm, jac_W_norm):
    """Bound on |d_hat_dot_star - d_hat_dot|.

    ``V_dev_norm`` is ||V - V_r|| and the Jacobian norms are spectral norms
    at the current state.
    """
    b = consts.b
    scale = float(np.linalg.norm(b)) / float(b @ b)
    return scale * ((k_x_star_norm + bounds.kx)
                    + (bounds.V + V_dev_norm) * jac_V_norm
                    + (W_norm + bounds.W) * jac_W_norm) * eps_du


def epsilon_r(b_e_dhat_dot_val, k_eta, b_ed_val, consts):
    if not k_eta > 0:
        raise ConfigError("k_eta must be positive")
    return 2.0 / consts.lambda_min_Q * (b_e_dhat_dot_val / k_eta + b_ed_val) * consts.LPb_norm


def lyapunov_V(e, k_x_err, k_r_err, V_err, W_err, gains, Lambda):
    e = np.asarray(e, dtype=float)
    quad = e @ gains.P @ e

    def weighted(err, G):
        err = np.atleast_1d(np.asarray(err, dtype=float))
        if err.size == 0:
            return 0.0
        return float(err @ np.linalg.solve(G, err))

    return float(quad + abs(Lambda) * (weighted(k_x_err, gains.Gamma_x)
                                       + k_r_err ** 2 / gains.gamma_r
                                       + weighted(V_err, gains.Gamma_V)
                                       + weighted(W_err, gains.Gamma_W)))


@dataclass
class RunMetrics:
    window: tuple
    rms_e: float
    sup_e: float
    sup_u_drj: float
    sup_u_drj_rate: float
    sup_eta: float
    sup_edu: float
    sup_ed: float
    sup_beta_adp: float
    settling: dict = field(default_factory=dict)

    def as_dict(self):
        out = {k: v for k, v in self.__dict__.items() if k not in ("settling", "window")}
        out["window_start"], out["window_end"] = self.window
        for k, v in self.settling.items():
            out[f"settling_{k}"] = v
        return out


def window_mask(t, window):
    t0, t1 = window
    if t0 < t[0] - 1e-12 or t1 > t[-1] + 1e-12 or t1 < t0:
        raise WindowOutOfRange(f"window {window} outside [{t[0]}, {t[-1]}]")
    return (t >= t0 - 1e-12) & (t <= t1 + 1e-12)


def rms(values, mask=None):
    v = np.asarray(values, dtype=float)
    if mask is not None:
        v = v[mask]
    return float(np.sqrt(np.mean(v ** 2))) if v.size else 0.0


def sup_abs(values, mask=None):
    v = np.abs(np.asarray(values, dtype=float))
    if mask is not None:
        v = v[mask]
    return float(v.max()) if v.size else 0.0


def sup_rate(t, values, mask=None, exclude=None):
    """Largest |first difference| / dt, optionally skipping flagged samples.

    ``exclude[k]`` drops the difference ending at sample k.
    """
    v = np.asarray(values, dtype=float)
    rate = np.abs(np.diff(v)) / np.diff(t)
    keep = np.ones_like(rate, dtype=bool)
    if mask is not None:
        keep &= mask[1:] & mask[:-1]
    if exclude is not None:
        keep &= ~np.asarray(exclude, dtype=bool)[1:]
    return float(rate[keep].max()) if keep.any() else 0.0


def settling_time(t, values, final_window, band_factor=1.05):
    """First time after which |values| stays within band_factor * sup over
    ``final_window``."""
    v = np.abs(np.asarray(values, dtype=float))
    band = band_factor * sup_abs(v, window_mask(t, final_window))
    outside = np.nonzero(v > band)[0]
    if outside.size == 0:
        return float(t[0])
    k = outside[-1] + 1
    return float(t[min(k, len(t) - 1)])


def run_metrics(log, window):
    t = log.t
    m = window_mask(t, window)
    mode = log["mode"]
    resets = np.isin(mode, [CASE_CODES[Case.RESET_TO_NEG_DHAT], CASE_CODES[Case.RESET_TO_ZERO]])
    integrating = log.meta.get("rejection_mode") == "integrating"
    settle_window = (max(t[0], t[-1] - 0.2 * (t[-1] - t[0])), t[-1])
    return RunMetrics(
        window=tuple(window),
        rms_e=rms(log["e_norm"], m),
        sup_e=sup_abs(log["e_norm"], m),
        sup_u_drj=sup_abs(log["u_drj"], m),
        sup_u_drj_rate=sup_rate(t, log["u_drj"], m, resets if integrating else None),
        sup_eta=sup_abs(log["eta"], m),
        sup_edu=sup_abs(log["edu_norm"], m),
        sup_ed=sup_abs(log["e_d"], m),
        sup_beta_adp=sup_abs(log["beta_adp"], m),
        settling={k: settling_time(t, log[c], settle_window)
                  for k, c in (("e", "e_norm"), ("edu", "edu_norm"), ("eta", "eta"))},
    )
