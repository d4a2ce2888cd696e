"""Disturbance-rejection input u_drj.

Three variants: ``off`` (plain MRAC), ``direct`` (cancel the estimate,
zeroed while the estimate exceeds the magnitude limit) and ``integrating``
(rate-limited integral action on eta = u_drj + d_hat with reset).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConfigError


class RejectionMode(str, enum.Enum):
    OFF = "off"
    DIRECT = "direct"
    INTEGRATING = "integrating"


class Case(str, enum.Enum):
    INTEGRATE = "integrate"
    RESET_TO_NEG_DHAT = "reset_to_neg_dhat"
    RESET_TO_ZERO = "reset_to_zero"
    DIRECT = "direct"
    DIRECT_BLOCKED = "direct_blocked"
    OFF = "off"


CASE_CODES = {c: i for i, c in enumerate(Case)}


@dataclass(frozen=True)
class RejectionConfig:
    mode: RejectionMode = RejectionMode.INTEGRATING
    u_bar: float = 10.0
    f_bar: float = 5.0
    k_eta: float = 1.0

    def __post_init__(self):
        try:
            mode = RejectionMode(self.mode)
        except ValueError:
            raise ConfigError(f"unknown rejection mode {self.mode!r}") from None
        object.__setattr__(self, "mode", mode)
        if mode is RejectionMode.OFF:
            return
        if self.u_bar is None or not self.u_bar > 0:
            raise ConfigError("rejection.u_bar must be positive")
        if mode is RejectionMode.INTEGRATING:
            if self.f_bar is None or not self.f_bar > 0:
                raise ConfigError("rejection.f_bar must be positive in integrating mode")
            if self.k_eta is None or not self.k_eta > 0:
                raise ConfigError("rejection.k_eta must be positive in integrating mode")


@dataclass(frozen=True)
class RejectionDecision:
    """Outcome of one guard evaluation.

    ``u_drj`` is the value in force after the decision (a jump target for
    the reset cases). ``saturated`` records which branch of the rate clamp
    was taken; it is held for the remainder of the step.
    """

    case: Case
    u_drj: float
    eta: float
    phi_drj: float = 0.0
    f_drj: float = 0.0
    saturated: int = 0


def eta_eval(u_drj, d_hat):
    return u_drj + d_hat


def phi_drj(eta, d_hat_dot_star, k_eta):
    return -k_eta * eta - d_hat_dot_star


def rate_clamp(phi, f_bar):
    """Return (f_drj, branch) with branch in {-1, 0, +1}."""
    if abs(phi) < f_bar:
        return phi, 0
    s = 1 if phi > 0 else -1
    return s * f_bar, s


def decide(u_drj_prev, d_hat, d_hat_dot_star, cfg):
    for v in (u_drj_prev, d_hat, d_hat_dot_star):
        if not math.isfinite(v):
            raise FloatingPointError("non-finite input to rejection decision")
    mode = cfg.mode
    if mode is RejectionMode.OFF:
        return RejectionDecision(Case.OFF, 0.0, eta_eval(0.0, d_hat))
    if mode is RejectionMode.DIRECT:
        if abs(d_hat) < cfg.u_bar:
            return RejectionDecision(Case.DIRECT, -d_hat, 0.0)
        return RejectionDecision(Case.DIRECT_BLOCKED, 0.0, d_hat)
    if abs(u_drj_prev) < cfg.u_bar:
        eta = eta_eval(u_drj_prev, d_hat)
        phi = phi_drj(eta, d_hat_dot_star, cfg.k_eta)
        f, branch = rate_clamp(phi, cfg.f_bar)
        return RejectionDecision(Case.INTEGRATE, u_drj_prev, eta, phi, f, branch)
    if abs(d_hat) < cfg.u_bar:
        return RejectionDecision(Case.RESET_TO_NEG_DHAT, -d_hat, 0.0)
    return RejectionDecision(Case.RESET_TO_ZERO, 0.0, d_hat)
