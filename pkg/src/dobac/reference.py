"""Reference model xr' = A_r xr + b Lambda_r r with r = c_r xr + s(t)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionMismatch
from .plant import Signal

# Closed reference loop may be marginally stable (the tracking target sin t
# is generated by a double integrator); only growth is rejected.
_MARGINAL_TOL = 1e-9


@dataclass(frozen=True)
class ReferenceConfig:
    A_r: np.ndarray
    b: np.ndarray
    Lambda_r: float
    V_r: np.ndarray
    c_r: np.ndarray = None
    excitation: Signal = field(default_factory=Signal.zero)
    r_kind: str = "feedback-plus-sinusoid"

    def __post_init__(self):
        A_r = np.atleast_2d(np.asarray(self.A_r, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        n = b.shape[0]
        if A_r.shape != (n, n):
            raise DimensionMismatch(f"A_r must be {n}x{n}, got {A_r.shape}")
        c_r = np.zeros(n) if self.c_r is None else np.asarray(self.c_r, dtype=float).reshape(-1)
        if c_r.shape != (n,):
            raise DimensionMismatch(f"c_r must have length {n}")
        if self.r_kind not in ("feedback-plus-sinusoid", "external-signal"):
            raise ConfigError(f"unknown r_kind {self.r_kind!r}")
        if self.r_kind == "external-signal" and np.any(c_r):
            raise ConfigError("external-signal reference input cannot feed back x_r")
        if self.Lambda_r == 0:
            raise ConfigError("Lambda_r must be nonzero")
        if np.max(np.linalg.eigvals(A_r).real) >= 0:
            raise ConfigError("A_r is not Hurwitz")
        closed = A_r + np.outer(b, c_r) * self.Lambda_r
        if np.max(np.linalg.eigvals(closed).real) > _MARGINAL_TOL:
            raise ConfigError("A_r + b Lambda_r c_r has an eigenvalue with positive real part")
        object.__setattr__(self, "A_r", A_r)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c_r", c_r)
        object.__setattr__(self, "Lambda_r", float(self.Lambda_r))
        object.__setattr__(self, "V_r", np.atleast_1d(np.asarray(self.V_r, dtype=float)).reshape(-1))

    @property
    def n(self):
        return self.b.shape[0]

    @property
    def closed_loop_matrix(self):
        return self.A_r + self.Lambda_r * np.outer(self.b, self.c_r)


def r_eval(x_r, t, cfg):
    return float(cfg.c_r @ x_r) + cfg.excitation(t)


def reference_deriv(x_r, t, cfg):
    x_r = np.asarray(x_r, dtype=float)
    if x_r.shape != (cfg.n,):
        raise DimensionMismatch(f"expected reference state of length {cfg.n}")
    return cfg.A_r @ x_r + cfg.b * (cfg.Lambda_r * r_eval(x_r, t, cfg))


def r_dot_eval(x_r, t, cfg):
    """Exact time derivative of r along the reference trajectory."""
    return float(cfg.c_r @ reference_deriv(x_r, t, cfg)) + cfg.excitation.derivative(t)


def tracking_error(x, x_r):
    x, x_r = np.asarray(x, dtype=float), np.asarray(x_r, dtype=float)
    if x.shape != x_r.shape:
        raise DimensionMismatch(f"state shapes differ: {x.shape} vs {x_r.shape}")
    return x - x_r
