"""Applying shifted lattice rules to integrands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .kernel import LatticeRule, ShiftLike, lattice_points

__all__ = [
    "Integrand",
    "RandomShiftEstimate",
    "apply_rule",
    "random_shift_estimate",
    "make_integrand",
    "INTEGRANDS",
]


@dataclass(frozen=True)
class Integrand:
    """Function on ``[0, 1)^s`` evaluated on an ``(n, s)`` array of points."""

    s: int
    func: Callable[[np.ndarray], np.ndarray]
    exact: Optional[float] = None
    name: str = "f"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(x), dtype=float)


@dataclass(frozen=True)
class RandomShiftEstimate:
    mean: float
    stderr: float
    q: int
    seed: int
    values: tuple[float, ...]


def apply_rule(rule: LatticeRule, shift: ShiftLike | None, f: Integrand) -> float:
    """Equal-weight average of ``f`` over the shifted lattice points."""
    if f.s != rule.s:
        raise ValueError(f"integrand has dimension {f.s}, rule has {rule.s}")
    pts = lattice_points(rule, shift)
    vals = f(pts)
    if vals.shape != (rule.n,):
        raise ValueError(f"integrand returned shape {vals.shape}, expected ({rule.n},)")
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"non-finite integrand value {vals[i]!r} at point k={i + 1}: {pts[i].tolist()}")
    return float(np.mean(vals))


def random_shift_estimate(rule: LatticeRule, f: Integrand, q: int, seed: int) -> RandomShiftEstimate:
    """Average of the rule over ``q`` independent uniform shifts.

    Shifts come from ``numpy.random.default_rng(seed)`` (PCG64), drawn as one
    ``(q, s)`` block, so the seed fixes every shift. The standard error uses
    the ``q - 1`` divisor and is NaN when ``q == 1``.
    """
    q = int(q)
    if q < 1:
        raise ValueError("need q >= 1")
    rng = np.random.default_rng(seed)
    shifts = rng.random((q, rule.s))
    vals = np.array([apply_rule(rule, sh, f) for sh in shifts])
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(q)) if q > 1 else math.nan
    return RandomShiftEstimate(mean, stderr, q, int(seed), tuple(float(v) for v in vals))


def _constant(s, params):
    c = float(params[0]) if params else 1.0
    return Integrand(s, lambda x: np.full(x.shape[0], c), c, "constant")


def _product(s, params):
    return Integrand(s, lambda x: np.prod(x, axis=1), 0.5 ** s, "product")


def _linear_product(s, params):
    # prod_j (1 + c_j (x_j - 1/2)); integral 1
    cs = np.resize(np.asarray(params if params else [1.0], dtype=float), s)
    return Integrand(s, lambda x: np.prod(1.0 + cs[None, :] * (x - 0.5), axis=1), 1.0, "linprod")


def _quadratic(s, params):
    # sum_j w_j x_j^2 with w_j = 1/j^2 unless given; integral sum_j w_j / 3
    if params:
        ws = np.resize(np.asarray(params, dtype=float), s)
    else:
        ws = 1.0 / np.arange(1, s + 1, dtype=float) ** 2
    return Integrand(s, lambda x: x ** 2 @ ws, float(ws.sum() / 3.0), "quadratic")


INTEGRANDS: dict[str, Callable[[int, Sequence[float]], Integrand]] = {
    "constant": _constant,
    "product": _product,
    "linprod": _linear_product,
    "quadratic": _quadratic,
}


def make_integrand(name: str, s: int, params: Sequence[float] = ()) -> Integrand:
    """Built-in test integrand with a known exact integral."""
    try:
        factory = INTEGRANDS[name]
    except KeyError:
        raise ValueError(f"unknown integrand {name!r}; choose from {sorted(INTEGRANDS)}") from None
    return factory(int(s), list(params))
