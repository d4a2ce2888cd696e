"""Adaptive control with observer-based, rate-limited disturbance rejection."""
from .adaptive import (AdaptationGains, ProjectionSet, ProjectionSets, control_law,
                       lyapunov_Q, projection, solve_matching)
from .config import InitialConditions, ScenarioConfig
from .errors import (ConfigError, DimensionMismatch, Diverged, DobacError, NonFiniteDerivative,
                     NotLyapunov, OutsideSet, SchemaMismatch, Unmatchable, WindowOutOfRange)
from .observer import ObserverConfig
from .plant import Basis, PlantParams, Signal, lumped_disturbance_truth, plant_deriv
from .reference import ReferenceConfig
from .rejection import Case, RejectionConfig, RejectionMode, decide
from .runlog import RunLog
from .scenario import PRESETS, load_scenario
from .sim import ClosedLoopState, advance, rk4_step, simulate

__all__ = [
    "AdaptationGains", "Basis", "Case", "ClosedLoopState", "ConfigError", "DimensionMismatch",
    "Diverged", "DobacError", "InitialConditions", "NonFiniteDerivative", "NotLyapunov",
    "ObserverConfig", "OutsideSet", "PRESETS", "PlantParams", "ProjectionSet", "ProjectionSets",
    "ReferenceConfig", "RejectionConfig", "RejectionMode", "RunLog", "ScenarioConfig",
    "SchemaMismatch", "Signal", "Unmatchable", "WindowOutOfRange", "advance", "control_law",
    "decide", "load_scenario", "lumped_disturbance_truth", "lyapunov_Q", "plant_deriv",
    "projection", "rk4_step", "simulate", "solve_matching",
]
