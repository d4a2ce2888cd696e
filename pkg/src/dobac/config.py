"""Validated scenario record consumed by the simulator."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .adaptive import AdaptationGains, ProjectionSets
from .errors import ConfigError, DimensionMismatch
from .observer import ObserverConfig
from .plant import PlantParams, Signal
from .reference import ReferenceConfig
from .rejection import RejectionConfig


@dataclass(frozen=True)
class InitialConditions:
    """Initial values; ``None`` entries are filled from the scenario
    (adaptive parameters at the projection-set centres, zero observer
    estimate)."""

    x: np.ndarray = None
    x_r: np.ndarray = None
    k_x: np.ndarray = None
    k_r: float = None
    V: np.ndarray = None
    W: np.ndarray = None
    d_u_hat: np.ndarray = None
    u_drj: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    plant: PlantParams
    reference: ReferenceConfig
    gains: AdaptationGains
    sets: ProjectionSets
    observer: ObserverConfig
    rejection: RejectionConfig
    disturbance: Signal
    initial: InitialConditions = field(default_factory=InitialConditions)
    t_end: float = 50.0
    h: float = 1e-3
    decimation: int = 1
    guard: float = 1e6
    name: str = "custom"

    def __post_init__(self):
        p, ref = self.plant, self.reference
        n = p.n
        if ref.n != n:
            raise DimensionMismatch("reference and plant dimensions differ")
        if not np.allclose(ref.b, p.b):
            raise ConfigError("reference model b must equal the plant's known b")
        if ref.V_r.size != p.basis_V.size:
            raise DimensionMismatch("V_r length must match basis_V")
        if not self.h > 0 or not self.t_end > 0:
            raise ConfigError("t_end and h must be positive")
        steps = self.t_end / self.h
        if abs(steps - round(steps)) > 1e-6 * max(1.0, steps):
            raise ConfigError(f"t_end/h = {steps} is not an integer")
        if round(steps) > 50_000_000:
            raise ConfigError("step count exceeds resource limit")
        if int(self.decimation) < 1:
            raise ConfigError("decimation must be >= 1")
        if not self.guard > 0:
            raise ConfigError("divergence guard must be positive")
        g = self.gains
        if g.Gamma_x.shape != (n, n) or g.P.shape != (n, n):
            raise DimensionMismatch("Gamma_x and P must be n x n")
        mV, mW = p.basis_V.size, p.basis_W.size
        if mV and g.Gamma_V.shape != (mV, mV):
            raise DimensionMismatch("Gamma_V must be m_V x m_V")
        if mW and g.Gamma_W.shape != (mW, mW):
            raise DimensionMismatch("Gamma_W must be m_W x m_W")
        s = self.sets
        if s.x.dim != n or s.r.dim != 1:
            raise DimensionMismatch("projection sets for k_x / k_r have wrong dimension")
        if mV and (s.V is None or s.V.dim != mV):
            raise DimensionMismatch("projection set for V missing or wrong dimension")
        if mW and (s.W is None or s.W.dim != mW):
            raise DimensionMismatch("projection set for W missing or wrong dimension")
        object.__setattr__(self, "initial", self._fill_initial())
        ic = self.initial
        for name, val, pset in (("k_x", ic.k_x, s.x), ("k_r", [ic.k_r], s.r),
                                ("V", ic.V, s.V), ("W", ic.W, s.W)):
            if pset is not None and np.size(val) and not pset.contains(val):
                raise ConfigError(f"initial {name} lies outside its projection set")

    def _fill_initial(self):
        ic, n, s = self.initial, self.plant.n, self.sets

        def vec(v, default, length):
            out = np.array(default if v is None else v, dtype=float).reshape(-1)
            if out.shape != (length,):
                raise DimensionMismatch(f"initial condition has length {out.size}, expected {length}")
            return out

        mV, mW = self.plant.basis_V.size, self.plant.basis_W.size
        return InitialConditions(
            x=vec(ic.x, np.zeros(n), n),
            x_r=vec(ic.x_r, np.zeros(n), n),
            k_x=vec(ic.k_x, s.x.center, n),
            k_r=float(s.r.center[0] if ic.k_r is None else ic.k_r),
            V=vec(ic.V, s.V.center if s.V is not None else np.zeros(0), mV),
            W=vec(ic.W, s.W.center if s.W is not None else np.zeros(0), mW),
            d_u_hat=vec(ic.d_u_hat, np.zeros(n), n),
            u_drj=float(ic.u_drj),
        )

    @property
    def n_steps(self):
        return int(round(self.t_end / self.h))

    def with_rejection(self, **kw):
        return replace(self, rejection=replace(self.rejection, **kw))
