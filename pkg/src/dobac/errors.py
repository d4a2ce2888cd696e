"""Exception types raised across the package."""


class DobacError(Exception):
    """Base class for all package errors."""


class ConfigError(DobacError, ValueError):
    """Invalid scenario or module configuration."""


class DimensionMismatch(DobacError, ValueError):
    pass


class NonFiniteDerivative(DobacError, FloatingPointError):
    """A vector-field evaluation produced NaN or Inf."""


class Diverged(DobacError, RuntimeError):
    """State norm exceeded the divergence guard."""

    def __init__(self, t, norm, guard, reason=None):
        super().__init__(reason or f"state norm {norm:.3g} exceeded guard {guard:.3g} at t={t:.6g}")
        self.t = t
        self.norm = norm
        self.guard = guard


class OutsideSet(DobacError, ValueError):
    """Adaptive parameter found outside its projection set."""


class Unmatchable(DobacError, ValueError):
    """Matching conditions have no solution for the given plant."""


class NotLyapunov(DobacError, ValueError):
    """A_r^T P + P A_r is not negative definite."""


class WindowOutOfRange(DobacError, ValueError):
    pass


class SchemaMismatch(DobacError, ValueError):
    pass
