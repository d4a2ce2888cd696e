"""Uncertain plant, nonlinearity bases and exogenous signals.

The plant is

    xdot = A x + b Lambda (V^T phi_V(x) + W^T phi_W(x) + u + d)

with ``A``, ``Lambda``, ``V`` and ``W`` unknown to the controller and ``b``,
``sign(Lambda)``, ``phi_V`` and ``phi_W`` known.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionMismatch

_TERM = re.compile(r"^x(\d+)(?:\^(\d+))?$")


@dataclass(frozen=True)
class Basis:
    """Vector of monomials in the state.

    ``exponents[i, j]`` is the power of ``x_j`` in component ``i``. An empty
    basis (zero rows) stands for a nonlinearity that is identically zero.
    """

    exponents: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        e = np.asarray(self.exponents, dtype=int)
        if e.ndim != 2 or (e < 0).any():
            raise ConfigError("basis exponents must be a 2-D array of nonnegative integers")
        object.__setattr__(self, "exponents", e)
        # nonzero (state index, power) pairs per component
        object.__setattr__(self, "_factors", tuple(
            tuple((j, int(k)) for j, k in enumerate(row) if k) for row in e))

    @property
    def size(self):
        return self.exponents.shape[0]

    @property
    def n(self):
        return self.exponents.shape[1]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"basis expects state of length {self.n}, got {x.shape}")
        out = np.ones(self.size)
        for i, factors in enumerate(self._factors):
            for j, k in factors:
                out[i] *= x[j] ** k
        return out

    def jacobian(self, x):
        """d phi / d x, shape (size, n)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"basis expects state of length {self.n}, got {x.shape}")
        jac = np.zeros((self.size, self.n))
        for i, factors in enumerate(self._factors):
            for j, k in factors:
                v = k * x[j] ** (k - 1)
                for jj, kk in factors:
                    if jj != j:
                        v *= x[jj] ** kk
                jac[i, j] = v
        return jac

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((0, n), dtype=int))

    @classmethod
    def parse(cls, terms, n):
        """Build a basis from strings such as ``"x1^3"`` or ``"x1*x2^2"``.

        Indices are 1-based. ``"zero"``, ``None`` or an empty list give the
        zero basis.
        """
        if terms is None or terms == "zero":
            return cls.zero(n)
        if isinstance(terms, str):
            terms = [terms]
        rows = []
        for term in terms:
            row = [0] * n
            for factor in str(term).replace(" ", "").split("*"):
                m = _TERM.match(factor)
                if not m:
                    raise ConfigError(f"cannot parse basis factor {factor!r} in {term!r}")
                j = int(m.group(1)) - 1
                if not 0 <= j < n:
                    raise ConfigError(f"basis factor {factor!r} refers to a state outside 1..{n}")
                row[j] += int(m.group(2) or 1)
            rows.append(row)
        if not rows:
            return cls.zero(n)
        return cls(np.array(rows, dtype=int), tuple(str(t) for t in terms))

    def describe(self):
        if self.size == 0:
            return "zero"
        out = []
        for p in self.exponents:
            parts = [f"x{j + 1}" + (f"^{k}" if k > 1 else "") for j, k in enumerate(p) if k]
            out.append("*".join(parts) or "1")
        return out


@dataclass(frozen=True)
class Signal:
    """Bounded scalar signal: offset + sum_k a_k sin(w_k t + p_k).

    ``kind`` is informational (``sinusoid``, ``constant``,
    ``sum-of-sinusoids`` or ``zero``); evaluation always uses the general form.
    """

    amplitudes: tuple = ()
    frequencies: tuple = ()
    phases: tuple = ()
    offset: float = 0.0
    kind: str = "sum-of-sinusoids"

    def __post_init__(self):
        a, w = tuple(map(float, self.amplitudes)), tuple(map(float, self.frequencies))
        p = tuple(map(float, self.phases)) if self.phases else (0.0,) * len(a)
        if not (len(a) == len(w) == len(p)):
            raise ConfigError("signal amplitudes, frequencies and phases must have equal length")
        if not all(map(math.isfinite, a + w + p + (float(self.offset),))):
            raise ConfigError("signal parameters must be finite")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "phases", p)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def zero(cls):
        return cls(kind="zero")

    @classmethod
    def constant(cls, value):
        return cls(offset=value, kind="constant")

    @classmethod
    def sinusoid(cls, amplitude, frequency, phase=0.0, offset=0.0):
        return cls((amplitude,), (frequency,), (phase,), offset, kind="sinusoid")

    def __call__(self, t):
        v = self.offset
        for a, w, p in zip(self.amplitudes, self.frequencies, self.phases):
            v += a * math.sin(w * t + p)
        return v

    def derivative(self, t):
        v = 0.0
        for a, w, p in zip(self.amplitudes, self.frequencies, self.phases):
            v += a * w * math.cos(w * t + p)
        return v

    @property
    def bound(self):
        """Closed-form sup_t |signal(t)|, possibly conservative for sums."""
        return abs(self.offset) + sum(abs(a) for a in self.amplitudes)


def disturbance_eval(sig, t):
    return sig(t)


@dataclass(frozen=True)
class PlantParams:
    A: np.ndarray
    b: np.ndarray
    Lambda: float
    V: np.ndarray
    W: np.ndarray
    basis_V: Basis
    basis_W: Basis
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        n = b.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatch(f"A must be {n}x{n}, got {A.shape}")
        if not np.any(b):
            raise ConfigError("b must be nonzero")
        if self.Lambda == 0 or not math.isfinite(self.Lambda):
            raise ConfigError("Lambda must be finite and nonzero")
        V = np.atleast_1d(np.asarray(self.V, dtype=float)).reshape(-1)
        W = np.atleast_1d(np.asarray(self.W, dtype=float)).reshape(-1)
        if self.basis_V.n != n or self.basis_W.n != n:
            raise DimensionMismatch("basis state dimension does not match the plant")
        if V.shape != (self.basis_V.size,):
            raise DimensionMismatch(f"V has length {V.size}, basis_V has {self.basis_V.size} terms")
        if W.shape != (self.basis_W.size,):
            raise DimensionMismatch(f"W has length {W.size}, basis_W has {self.basis_W.size} terms")
        for name, val in (("A", A), ("b", b), ("V", V), ("W", W)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "Lambda", float(self.Lambda))

    @property
    def n(self):
        return self.b.shape[0]


def _check_x(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatch(f"expected state of length {n}, got shape {x.shape}")
    return x


def plant_deriv(x, u, d, p):
    """A x + b Lambda (V^T phi_V(x) + W^T phi_W(x) + u + d)."""
    x = _check_x(x, p.n)
    drive = p.V @ p.basis_V(x) + p.W @ p.basis_W(x) + u + d
    return p.A @ x + p.b * (p.Lambda * drive)


def lumped_disturbance_truth(x, u, d, p, ref):
    """Everything in xdot not explained by the nominal reference-model structure.

    ``ref`` supplies ``A_r``, ``Lambda_r`` and ``V_r``.
    """
    x = _check_x(x, p.n)
    phi_V = p.basis_V(x)
    scal = ((p.Lambda * p.V - ref.Lambda_r * ref.V_r) @ phi_V
            + (p.Lambda - ref.Lambda_r) * u
            + p.Lambda * (p.W @ p.basis_W(x))
            + p.Lambda * d)
    return (p.A - ref.A_r) @ x + p.b * scal
