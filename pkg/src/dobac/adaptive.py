"""MRAC control law, projection-based adaptation and matching conditions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NotLyapunov, OutsideSet, Unmatchable


@dataclass(frozen=True)
class ProjectionSet:
    """Convex set {theta : f(theta) <= 1} with
    f(theta) = (theta - center)^T diag(alpha) (theta - center) + offset.

    ``half_width`` records the declared interval around ``center`` that the
    true parameter is known to lie in; it is used for the error bound.
    """

    center: np.ndarray
    alpha: np.ndarray
    offset: float = -1.0
    half_width: np.ndarray = None
    margin: float = 0.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        a = np.broadcast_to(np.asarray(self.alpha, dtype=float), c.shape).copy()
        if (a <= 0).any():
            raise ConfigError("projection weights must be positive")
        if self.offset >= 1:
            raise ConfigError("projection offset must be below 1 for a nonempty set")
        hw = np.zeros_like(c) if self.half_width is None else np.broadcast_to(
            np.asarray(self.half_width, dtype=float), c.shape).copy()
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "half_width", hw)
        object.__setattr__(self, "offset", float(self.offset))
        if self.f(c + hw) > 1 + 1e-12 and hw.any():
            raise ConfigError("projection set does not contain the declared parameter box")

    @classmethod
    def from_interval(cls, lo, hi, margin=0.1, offset=-1.0):
        """Set centred on the box [lo, hi] whose boundary clears it by ``margin``.

        Along each axis the ellipsoid reaches ``sqrt(m) * (s + margin)`` from
        the centre (``m`` the block size), so the box corners plus margin lie
        inside; for scalars the boundary sits exactly at ``s + margin``.
        """
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if (hi < lo).any():
            raise ConfigError("interval upper bound below lower bound")
        c = 0.5 * (lo + hi)
        s = 0.5 * (hi - lo)
        alpha = (1.0 - offset) / (c.size * (s + margin) ** 2)
        return cls(c, alpha, offset, s, margin)

    @property
    def dim(self):
        return self.center.size

    def f(self, theta):
        d = np.asarray(theta, dtype=float) - self.center
        return float(d @ (self.alpha * d)) + self.offset

    def grad(self, theta):
        return 2.0 * self.alpha * (np.asarray(theta, dtype=float) - self.center)

    def contains(self, theta, tol=0.0):
        return self.f(theta) <= 1.0 + tol

    def error_bound(self):
        """Upper bound on ||theta - theta_true|| for theta in the set and
        theta_true in the declared box: farthest set point from the centre
        plus the box half-diagonal."""
        reach = np.sqrt((1.0 - self.offset) / self.alpha.min())
        return float(reach + np.linalg.norm(self.half_width))


@dataclass(frozen=True)
class ProjectionSets:
    x: ProjectionSet
    r: ProjectionSet
    V: ProjectionSet = None
    W: ProjectionSet = None


@dataclass(frozen=True)
class AdaptationGains:
    Gamma_x: np.ndarray
    gamma_r: float
    Gamma_V: np.ndarray
    Gamma_W: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        for name in ("Gamma_x", "Gamma_V", "Gamma_W", "P"):
            M = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            if M.size and not _is_spd(M):
                raise ConfigError(f"{name} must be symmetric positive definite")
            object.__setattr__(self, name, M)
        if not self.gamma_r > 0:
            raise ConfigError("gamma_r must be positive")
        object.__setattr__(self, "gamma_r", float(self.gamma_r))


@dataclass(frozen=True)
class MatchedGains:
    k_x_star: np.ndarray
    k_r_star: float


def _is_spd(M):
    if M.shape[0] != M.shape[1] or not np.allclose(M, M.T, rtol=0, atol=1e-12):
        return False
    return bool(np.linalg.eigvalsh(M).min() > 0)


OUTSIDE_TOL = 1e-2


def projection(theta, y, pset, tol=OUTSIDE_TOL):
    """Smooth projection operator.

    Leaves ``y`` alone in the interior (f <= 0) or when it points inward;
    otherwise removes the component along grad f, scaled by f, so that the
    radial component is gone entirely on the boundary f = 1.
    """
    f = pset.f(theta)
    if f > 1.0 + tol:
        raise OutsideSet(f"f(theta) = {f:.6g} exceeds 1 + {tol:g} at theta = {theta}")
    if f <= 0.0:
        return y
    g = pset.grad(theta)
    gy = float(g @ y)
    if gy <= 0.0:
        return y
    return y - g * (gy / float(g @ g)) * f


def control_law(s, r, u_drj, basis_V, basis_W, phi_V=None, phi_W=None):
    """u = k_x^T x + k_r r - V^T phi_V(x) - W^T phi_W(x) + u_drj."""
    if phi_V is None:
        phi_V = basis_V(s.x)
    if phi_W is None:
        phi_W = basis_W(s.x)
    return float(s.k_x @ s.x) + s.k_r * r - float(s.V @ phi_V) - float(s.W @ phi_W) + u_drj


def regressors(s, r, P, b, sign_Lambda, phi_V, phi_W):
    """Raw update directions (v_x, v_r, v_V, v_W) before projection."""
    ePb = float((s.x - s.x_r) @ (P @ b)) * sign_Lambda
    return -s.x * ePb, -r * ePb, phi_V * ePb, phi_W * ePb


def adaptation_deriv(s, r, gains, sets, sign_Lambda, b, basis_V, basis_W,
                     phi_V=None, phi_W=None):
    """Time derivatives of (k_x, k_r, V, W) under projection."""
    if phi_V is None:
        phi_V = basis_V(s.x)
    if phi_W is None:
        phi_W = basis_W(s.x)
    v_x, v_r, v_V, v_W = regressors(s, r, gains.P, b, sign_Lambda, phi_V, phi_W)
    dk_x = gains.Gamma_x @ projection(s.k_x, v_x, sets.x)
    dk_r = gains.gamma_r * float(projection(np.array([s.k_r]), np.array([v_r]), sets.r)[0])
    dV = gains.Gamma_V @ projection(s.V, v_V, sets.V) if s.V.size else np.zeros(0)
    dW = gains.Gamma_W @ projection(s.W, v_W, sets.W) if s.W.size else np.zeros(0)
    return dk_x, dk_r, dV, dW


def solve_matching(A, A_r, b, Lambda, Lambda_r, tol=1e-8):
    """Ideal gains with A_r = A + b Lambda k_x*^T and b Lambda_r = b Lambda k_r*."""
    A, A_r = np.atleast_2d(A).astype(float), np.atleast_2d(A_r).astype(float)
    b = np.asarray(b, dtype=float).reshape(-1)
    bl = b * Lambda
    # least squares over rows: (b Lambda) k^T = A_r - A
    k = bl @ (A_r - A) / float(bl @ bl)
    resid = np.abs(np.outer(bl, k) - (A_r - A)).max()
    if resid > tol:
        raise Unmatchable(f"A_r - A is not spanned by b (residual {resid:.3g})")
    return MatchedGains(k, Lambda_r / Lambda)


def lyapunov_Q(A_r, P):
    A_r, P = np.atleast_2d(A_r).astype(float), np.atleast_2d(P).astype(float)
    if not _is_spd(P):
        raise ConfigError("P must be symmetric positive definite")
    Q = -(A_r.T @ P + P @ A_r)
    if np.linalg.eigvalsh(0.5 * (Q + Q.T)).min() <= 0:
        raise NotLyapunov("A_r^T P + P A_r is not negative definite")
    return Q
