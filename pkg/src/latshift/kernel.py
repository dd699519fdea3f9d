"""Elementary kernels for shifted rank-1 lattice rules.

Point indices run over ``k = 1, ..., N``; the point ``k = N`` is the origin
of the unshifted lattice. Products ``k * z`` are reduced modulo ``N`` in
integer arithmetic before dividing, so point coordinates are exact
multiples of ``1/N`` up to the final division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "LatticeRule",
    "HalfShift",
    "RealShift",
    "frac",
    "bernoulli2",
    "pair_kernel",
    "lattice_points",
    "as_delta",
]


def frac(x):
    """Fractional part ``x - floor(x)``, always in ``[0, 1)``.

    Works on scalars and arrays. Values that round up to exactly 1.0 are
    mapped to 0.0.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("frac: non-finite input")
    out = arr - np.floor(arr)
    out = np.where(out >= 1.0, 0.0, out)
    if np.ndim(x) == 0:
        return float(out)
    return out


def _b2(x):
    # unchecked, for vectorised inner loops
    return x * x - x + 1.0 / 6.0


def bernoulli2(x):
    """Second Bernoulli polynomial ``B2(x) = x**2 - x + 1/6`` on ``[0, 1]``."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
        raise ValueError("bernoulli2: argument must lie in [0, 1]")
    out = _b2(arr)
    if np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class LatticeRule:
    """Rank-1 lattice with ``n`` points and generating vector ``z``."""

    n: int
    z: tuple[int, ...]

    def __init__(self, n: int, z: Sequence[int]):
        n = int(n)
        zt = tuple(int(v) for v in z)
        if n < 2:
            raise ValueError(f"need n >= 2, got {n}")
        if len(zt) < 1:
            raise ValueError("generating vector must have at least one component")
        bad = [v for v in zt if not 1 <= v <= n - 1]
        if bad:
            raise ValueError(f"generating vector components must lie in 1..{n - 1}, got {bad[:5]}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "z", zt)

    @property
    def s(self) -> int:
        return len(self.z)

    def prefix(self, s: int) -> "LatticeRule":
        if not 1 <= s <= self.s:
            raise ValueError(f"prefix length {s} outside 1..{self.s}")
        return LatticeRule(self.n, self.z[:s])

    def residues(self) -> np.ndarray:
        """Integer array ``(k * z_j) mod n`` of shape ``(n, s)``, rows ``k = 1..n``."""
        k = np.arange(1, self.n + 1, dtype=np.int64)[:, None]
        return (k * np.asarray(self.z, dtype=np.int64)[None, :]) % self.n


@dataclass(frozen=True)
class HalfShift:
    """Shift whose components are odd multiples of ``1/(2n)``.

    Stored as indices ``m_j`` in ``1..n`` with ``delta_j = (2 m_j - 1) / (2 n)``.
    """

    n: int
    m: tuple[int, ...]

    def __init__(self, n: int, m: Sequence[int]):
        n = int(n)
        mt = tuple(int(v) for v in m)
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        bad = [v for v in mt if not 1 <= v <= n]
        if bad:
            raise ValueError(f"half-shift indices must lie in 1..{n}, got {bad[:5]}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", mt)

    @property
    def s(self) -> int:
        return len(self.m)

    @property
    def delta(self) -> np.ndarray:
        return (2.0 * np.asarray(self.m, dtype=float) - 1.0) / (2.0 * self.n)

    def to_real(self) -> "RealShift":
        return RealShift(self.delta)


@dataclass(frozen=True)
class RealShift:
    """General shift vector with components in ``[0, 1)``."""

    delta: tuple[float, ...]

    def __init__(self, delta: Sequence[float]):
        dt = tuple(float(v) for v in np.ravel(np.asarray(delta, dtype=float)))
        for v in dt:
            if not (math.isfinite(v) and 0.0 <= v < 1.0):
                raise ValueError(f"shift components must lie in [0, 1), got {v!r}")
        object.__setattr__(self, "delta", dt)

    @property
    def s(self) -> int:
        return len(self.delta)

    @classmethod
    def zero(cls, s: int) -> "RealShift":
        return cls([0.0] * s)


ShiftLike = Union[HalfShift, RealShift, Sequence[float], np.ndarray]


def as_delta(shift: ShiftLike, s: int) -> np.ndarray:
    """Shift components as a float array of length ``s``."""
    if isinstance(shift, HalfShift):
        delta = shift.delta
    elif isinstance(shift, RealShift):
        delta = np.asarray(shift.delta, dtype=float)
    else:
        delta = np.asarray(RealShift(shift).delta, dtype=float)
    if delta.shape != (s,):
        raise ValueError(f"shift has {delta.size} components, rule has dimension {s}")
    return delta


def pair_kernel(k: int, kp: int, z: int, n: int, delta: float) -> float:
    """Shift-dependent pair term ``({kz/n + delta} - 1/2) ({k'z/n + delta} - 1/2)``."""
    if not (1 <= k <= n and 1 <= kp <= n):
        raise ValueError("point indices must lie in 1..n")
    if not 1 <= z <= n - 1:
        raise ValueError("z must lie in 1..n-1")
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    x = frac((k * z % n) / n + delta)
    xp = frac((kp * z % n) / n + delta)
    return (x - 0.5) * (xp - 0.5)


def lattice_points(rule: LatticeRule, shift: ShiftLike | None = None) -> np.ndarray:
    """Points ``{k z / n + delta}`` for ``k = 1..n`` as an ``(n, s)`` array."""
    pts = rule.residues() / rule.n
    if shift is not None:
        pts = pts + as_delta(shift, rule.s)[None, :]
    return frac(pts)
