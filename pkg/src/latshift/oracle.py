"""Slow reference evaluators.

Everything here is computed the obvious way: explicit enumeration of
coordinate subsets, explicit enumeration of the half-shift grid, and
literal midpoint sums. Nothing is shared with the product-weight fast
paths in :mod:`latshift.wce` beyond the scalar kernels.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .kernel import LatticeRule, ShiftLike, as_delta, bernoulli2, frac, pair_kernel
from .weights import ProductWeights, SubsetWeights

__all__ = [
    "ProofTerms",
    "brute_sq_wce",
    "brute_shift_avg",
    "brute_half_shift_avg",
    "proof_terms",
    "proof_term_table",
    "midpoint_rule",
    "simpson_rule",
    "pair_kernel_integral",
    "VerifyReport",
    "verify_suite",
    "MAX_ORACLE_S",
    "MAX_GRID",
]

MAX_ORACLE_S = 12
MAX_GRID = 10 ** 5


def _theta(n: int, z: int, delta: float) -> np.ndarray:
    out = np.empty((n, n))
    for k in range(1, n + 1):
        for kp in range(1, n + 1):
            d = ((k - kp) * z) % n / n
            out[k - 1, kp - 1] = 0.5 * bernoulli2(d) + pair_kernel(k, kp, z, n, delta)
    return out


def _subset_sum(thetas: list[np.ndarray], sw: SubsetWeights) -> float:
    total = 0.0
    for u in sw.subsets():
        g = sw[u]
        if g == 0.0:
            continue
        prod = np.ones_like(thetas[0])
        for j in u:
            prod = prod * thetas[j - 1]
        total += g * prod.sum()
    return total


def _check_dims(rule: LatticeRule, sw: SubsetWeights) -> None:
    if rule.s > MAX_ORACLE_S:
        raise ValueError(f"oracle limited to s <= {MAX_ORACLE_S}, got {rule.s}")
    if sw.s != rule.s:
        raise ValueError(f"subset weights for s={sw.s}, rule has s={rule.s}")


def brute_sq_wce(rule: LatticeRule, shift: ShiftLike, sw: SubsetWeights) -> float:
    """Squared worst-case error by explicit sum over pairs and subsets."""
    _check_dims(rule, sw)
    delta = as_delta(shift, rule.s)
    thetas = [_theta(rule.n, rule.z[j], delta[j]) for j in range(rule.s)]
    return _subset_sum(thetas, sw) / rule.n ** 2


def brute_shift_avg(rule: LatticeRule, sw: SubsetWeights) -> float:
    """Shift-averaged squared error by explicit sum over points and subsets."""
    _check_dims(rule, sw)
    n = rule.n
    total = 0.0
    for k in range(1, n + 1):
        b = [bernoulli2(k * zj % n / n) for zj in rule.z]
        for u in sw.subsets():
            g = sw[u]
            if g:
                total += g * math.prod(b[j - 1] for j in u)
    return total / n


def brute_half_shift_avg(rule: LatticeRule, sw: SubsetWeights) -> float:
    """Mean of the squared error over every shift in the half-shift grid."""
    _check_dims(rule, sw)
    n, s = rule.n, rule.s
    if n ** s > MAX_GRID:
        raise ValueError(f"half-shift grid of size {n}^{s} exceeds {MAX_GRID}")
    mus = [(2 * m - 1) / (2 * n) for m in range(1, n + 1)]
    # theta tables for every coordinate and every grid value of that coordinate
    tables = [[_theta(n, rule.z[j], mu) for mu in mus] for j in range(s)]
    total = 0.0
    for idx in itertools.product(range(n), repeat=s):
        total += _subset_sum([tables[j][idx[j]] for j in range(s)], sw) / n ** 2
    return total / n ** s


@dataclass(frozen=True)
class ProofTerms:
    """Per-pair terms of the averaging argument for one coordinate.

    ``c`` is half the Bernoulli term, ``a`` adds the exact integral of the
    pair kernel over the shift, ``b`` adds its average over the midpoints
    ``mu``.
    """

    a: float
    b: float
    c: float
    mu: tuple[float, ...] = field(repr=False)


def proof_terms(k: int, kp: int, z: int, n: int) -> ProofTerms:
    d = ((k - kp) * z) % n / n
    c = 0.5 * bernoulli2(d)
    # integral over the shift of ({x+t}-1/2)({y+t}-1/2) is B2({x-y})/2
    a = c + 0.5 * bernoulli2(d)
    mu = tuple((2 * m - 1) / (2 * n) for m in range(1, n + 1))
    b = c + sum(pair_kernel(k, kp, z, n, t) for t in mu) / n
    return ProofTerms(a=a, b=b, c=c, mu=mu)


def proof_term_table(n: int, z: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays ``(a, b, c)`` of shape ``(n, n)`` over all pairs ``k, k' = 1..n``.

    Same quantities as :func:`proof_terms`, with the midpoint average taken
    literally over the ``n`` midpoints as a dense ``(n, n, n)`` evaluation.
    """
    if not 1 <= z <= n - 1:
        raise ValueError("z must lie in 1..n-1")
    k = np.arange(1, n + 1, dtype=np.int64)
    x = (k * z % n) / n
    d = ((k[:, None] - k[None, :]) * z % n) / n
    c = 0.5 * bernoulli2(d)
    a = c + 0.5 * bernoulli2(d)
    mu = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    xs = frac(x[:, None] + mu[None, :]) - 0.5  # (point, midpoint)
    b = c + np.einsum("im,jm->ij", xs, xs) / n
    return a, b, c


def midpoint_rule(f: Callable[[np.ndarray], np.ndarray], M: int) -> float:
    """Composite midpoint rule on ``[0, 1]`` with ``M`` equal subintervals."""
    t = (np.arange(M) + 0.5) / M
    return float(np.sum(f(t)) / M)


def simpson_rule(piece: Callable[[np.ndarray, np.ndarray], np.ndarray], M: int) -> float:
    """Composite Simpson rule on ``[0, 1]`` with ``M`` subintervals.

    ``piece(t, centre)`` evaluates the integrand's smooth branch on the cell
    with the given centre, which may differ from the integrand itself at the
    cell's endpoints. Jumps located exactly at the breakpoints ``j/M`` are
    therefore integrated piece by piece without touching them.
    """
    h = 1.0 / M
    left = np.arange(M) * h
    mid = left + 0.5 * h
    vals = piece(left, mid) + 4.0 * piece(mid, mid) + piece(left + h, mid)
    return float(np.sum(vals) * h / 6.0)


def pair_kernel_integral(k: int, kp: int, z: int, n: int, M: int, rule: str = "midpoint") -> float:
    """Integral of the pair kernel over the shift by composite quadrature.

    ``"simpson"`` needs ``M`` to be a multiple of ``n`` so that the jumps
    fall on cell boundaries; it is then exact up to rounding.
    """
    x = k * z % n / n
    y = kp * z % n / n

    if rule == "midpoint":
        return midpoint_rule(lambda t: (frac(x + t) - 0.5) * (frac(y + t) - 0.5), M)
    if rule == "simpson":
        if M % n:
            raise ValueError(f"simpson needs M to be a multiple of n={n}, got {M}")

        def piece(t, centre):
            # continue each sawtooth linearly from the cell centre
            return (frac(x + centre) + (t - centre) - 0.5) * (frac(y + centre) + (t - centre) - 0.5)

        return simpson_rule(piece, M)
    raise ValueError(f"unknown rule {rule!r}")


@dataclass
class VerifyReport:
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, passed: bool, what: str) -> None:
        self.checks += 1
        if not passed:
            self.failures.append(what)


def verify_suite(max_n: int = 12, max_s: int = 3, slack: float = 1e-14) -> VerifyReport:
    """Averaging bound over an exhaustive grid plus proof-term and oracle checks.

    For ``N = 2..max_n``, ``s = 1..max_s`` and every generating vector in
    ``{1..N-1}^s`` with weights ``1/j^2``, the gap between the shift-averaged
    and half-shift-averaged squared errors must stay within the bound.
    Proof-term bounds are checked for every pair at each ``N``, and the
    fast evaluators are compared with the subset/grid oracles on the
    smaller instances.
    """
    from .wce import half_shift_avg_sq_wce, shift_avg_sq_wce, squared_wce, theorem1_bound

    rep = VerifyReport()
    for n in range(2, max_n + 1):
        for k in range(1, n + 1):
            for kp in range(1, n + 1):
                for z in range(1, n):
                    t = proof_terms(k, kp, z, n)
                    rep.record(abs(t.a - t.b) <= 1.0 / (12 * n * n) + slack,
                               f"|a-b| bound: n={n} k={k} k'={kp} z={z}")
                    rep.record(abs(t.a) <= 1 / 3 + slack and abs(t.b) <= 1 / 3 + slack,
                               f"|a|,|b| <= 1/3: n={n} k={k} k'={kp} z={z}")
        for s in range(1, max_s + 1):
            w = ProductWeights(tuple(1.0 / (j * j) for j in range(1, s + 1)), "1/j^2")
            bound = theorem1_bound(n, w, s)
            for z in itertools.product(range(1, n), repeat=s):
                rule = LatticeRule(n, z)
                gap = abs(shift_avg_sq_wce(rule, w) - half_shift_avg_sq_wce(rule, w))
                rep.record(gap <= bound + slack, f"averaging bound: n={n} z={z}")
            if n ** s <= 64:
                sw = SubsetWeights.from_product(w, s)
                z = tuple(range(1, s + 1)) if n > s else (1,) * s
                rule = LatticeRule(n, z)
                fast = half_shift_avg_sq_wce(rule, w)
                rep.record(math.isclose(fast, brute_half_shift_avg(rule, sw), rel_tol=1e-12),
                           f"half-shift oracle: n={n} z={z}")
                delta = [(2 * ((j * 7) % n) + 1) / (2 * n) for j in range(s)]
                rep.record(math.isclose(squared_wce(rule, delta, w),
                                        brute_sq_wce(rule, delta, sw), rel_tol=1e-12),
                           f"squared error oracle: n={n} z={z}")
    return rep
