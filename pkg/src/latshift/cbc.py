"""Component-by-component constructions.

``cbc_vector`` builds a generating vector one coordinate at a time by
minimising the shift-averaged squared worst-case error. ``cbc_shift`` takes
such a vector and chooses a deterministic shift, one coordinate at a time,
from the half-shifts ``(2m - 1)/(2N)``, ``m = 1..N``, by minimising the
squared worst-case error of the shifted rule.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .kernel import HalfShift, LatticeRule, _b2
from .wce import (
    Summation,
    _check_summation,
    _ratio,
    sequential_sum,
    shift_avg_profile,
    squared_wce_profile,
)
from .weights import ProductWeights

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is optional
    njit = None

__all__ = [
    "CbcVectorResult",
    "CbcShiftResult",
    "candidate_set",
    "cbc_vector",
    "cbc_shift",
    "zero_shift_kappas",
    "DEFAULT_MAX_N",
]

log = logging.getLogger(__name__)

# the shift search keeps two dense N x N pair caches plus temporaries
DEFAULT_MAX_N = 4096
TIE_RTOL = 1e-12


def _argmin_first(values: np.ndarray, rtol: float = TIE_RTOL) -> int:
    """Index of the smallest value; near-ties go to the lowest index."""
    lo = float(np.min(values))
    cutoff = lo + rtol * abs(lo)
    return int(np.flatnonzero(values <= cutoff)[0])


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("LATSHIFT_JOBS", "1")))
    except ValueError:
        return 1


def candidate_set(n: int, which: str = "coprime") -> np.ndarray:
    """Candidate generating-vector components in ``1..n-1``.

    ``"coprime"`` keeps those coprime to ``n`` (all of them when ``n`` is
    prime, the odd ones for powers of two); ``"all"`` keeps every value.
    """
    cand = np.arange(1, n, dtype=np.int64)
    if which == "all":
        return cand
    if which == "coprime":
        return cand[np.gcd(cand, n) == 1]
    raise ValueError(f"unknown candidate set {which!r}")


@dataclass(frozen=True)
class CbcVectorResult:
    n: int
    z: tuple[int, ...]
    esh2: tuple[float, ...]
    candidates: str
    weights: ProductWeights

    @property
    def rule(self) -> LatticeRule:
        return LatticeRule(self.n, self.z)


def cbc_vector(n: int, s_max: int, w: ProductWeights, candidates: str = "coprime",
               chunk: int = 256) -> CbcVectorResult:
    """Greedy generating vector for the shift-averaged squared error.

    The first component is fixed to 1. Running per-point products are kept
    between stages, so each stage costs ``O(N * #candidates)``.
    """
    n, s_max = int(n), int(s_max)
    if n < 2:
        raise ValueError("need n >= 2")
    if s_max < 1:
        raise ValueError("need s_max >= 1")
    gamma = w.array(s_max)
    cand = candidate_set(n, candidates)
    if cand.size == 0:
        raise ValueError(f"empty candidate set for n={n}")
    k = np.arange(1, n + 1, dtype=np.int64)

    # E holds prod_j (1 + gamma_j B2({k z_j / n})) - 1 for each point k
    E = gamma[0] * _b2(k % n / n)
    z = [1]
    esh2 = [E.sum() / n]
    for j in range(1, s_max):
        vals = np.empty(cand.size)
        Q = 1.0 + E
        for c0 in range(0, cand.size, chunk):
            cz = cand[c0:c0 + chunk]
            table = _b2((cz[:, None] * k[None, :]) % n / n)
            vals[c0:c0 + chunk] = E.sum() + gamma[j] * (table @ Q)
        best = int(cand[_argmin_first(vals)])
        E = E + gamma[j] * _b2(k * best % n / n) * Q
        z.append(best)
        esh2.append(E.sum() / n)
        log.debug("cbc_vector: s=%d z=%d esh2=%.6e", j + 1, best, esh2[-1])
    return CbcVectorResult(n, tuple(z), tuple(float(v) for v in esh2), candidates, w.truncated(s_max))


@dataclass(frozen=True)
class CbcShiftResult:
    """Shift indices and per-dimension errors from the shift construction.

    ``m[s-1]`` encodes ``delta_s = (2 m_s - 1) / (2 n)``. ``e2`` and ``e2_zero``
    are squared worst-case errors of the leading ``s`` coordinates with the
    constructed shift and with the zero shift; ``esh2`` is the
    shift-averaged squared error; ``kappa`` and ``kappa0`` are the square
    roots of the respective ratios.
    """

    n: int
    z: tuple[int, ...]
    m: tuple[int, ...]
    e2: tuple[float, ...]
    e2_zero: tuple[float, ...]
    esh2: tuple[float, ...]
    kappa: tuple[float, ...]
    kappa0: tuple[float, ...]
    summation: str
    weights: ProductWeights

    def __len__(self) -> int:
        return len(self.m)

    @property
    def shift(self) -> HalfShift:
        return HalfShift(self.n, self.m)

    @property
    def rule(self) -> LatticeRule:
        return LatticeRule(self.n, self.z)

    def rows(self):
        for i in range(len(self.m)):
            yield i + 1, self.m[i], self.kappa[i], self.kappa0[i]


def _half_shift_rows(p: np.ndarray, n: int, m: np.ndarray) -> np.ndarray:
    # {p/n + (2m-1)/(2n)} - 1/2 for each candidate m (rows) and point (cols)
    r = (p[None, :] + m[:, None] - 1) % n
    return (r + 0.5) / n - 0.5


def _plain_scan_numpy(P, c, g, U, out):
    n = P.shape[0]
    rows = max(1, (1 << 16) // n)
    for t in range(U.shape[0]):
        u = U[t]
        acc = 0.0
        for r0 in range(0, n, rows):
            term = P[r0:r0 + rows] * (1.0 + g * (c[r0:r0 + rows] + np.outer(u[r0:r0 + rows], u)))
            flat = term.ravel()
            # folding the running total into the first element keeps the
            # accumulation strictly left to right across row blocks
            flat[0] += acc
            acc = float(np.cumsum(flat)[-1])
        out[t] = acc


if njit is not None:
    @njit(cache=True, nogil=True)
    def _plain_scan_numba(P, c, g, U, out):  # pragma: no cover - compiled
        n = P.shape[0]
        for t in range(U.shape[0]):
            acc = 0.0
            for i in range(n):
                ui = U[t, i]
                for j in range(n):
                    acc += P[i, j] * (1.0 + g * (c[i, j] + ui * U[t, j]))
            out[t] = acc

    _plain_scan = _plain_scan_numba
else:  # pragma: no cover
    _plain_scan = _plain_scan_numpy


def _map_chunks(fn, n_items: int, chunk: int, jobs: int) -> np.ndarray:
    bounds = [(a, min(n_items, a + chunk)) for a in range(0, n_items, chunk)]
    if jobs <= 1 or len(bounds) == 1:
        parts = [fn(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(lambda ab: fn(*ab), bounds))
    return np.concatenate(parts)


def cbc_shift(n: int, z: Sequence[int], s_max: int | None, w: ProductWeights,
              summation: Summation = "stable", esh2: Sequence[float] | None = None,
              jobs: int | None = None, max_n: int = DEFAULT_MAX_N,
              tie_rtol: float = TIE_RTOL) -> CbcShiftResult:
    """Choose half-shift components one coordinate at a time.

    At stage ``s`` every ``m`` in ``1..n`` is tried for the ``s``-th shift
    component with the earlier components frozen, and the smallest index
    attaining the minimal squared worst-case error is kept.

    Per-pair running products over the finished coordinates are cached in
    an ``n x n`` matrix, so one stage costs ``O(n^3)``. In ``"stable"``
    mode the candidate scan is the quadratic form ``u_m^T (1 + D) u_m``
    for every ``m`` at once, done as a matrix product. In ``"plain"`` mode
    each candidate's ``n^2`` pair products are formed and accumulated left
    to right.

    ``esh2`` may carry shift-averaged squared errors already computed (for
    example by ``cbc_vector``); otherwise they are recomputed.
    """
    _check_summation(summation)
    n = int(n)
    z = tuple(int(v) for v in z)
    if s_max is None:
        s_max = len(z)
    if len(z) < s_max:
        raise ValueError(f"generating vector has {len(z)} components, need {s_max}")
    if n > max_n:
        raise MemoryError(f"n={n} exceeds the configured ceiling {max_n} for the pair cache")
    rule = LatticeRule(n, z[:s_max])
    gamma = w.array(s_max)
    jobs = default_jobs() if jobs is None else max(1, int(jobs))

    if esh2 is None:
        esh2 = shift_avg_profile(rule, w, summation)
    else:
        if len(esh2) < s_max:
            raise ValueError("esh2 shorter than s_max")
        esh2 = np.asarray(esh2[:s_max], dtype=float)

    res = rule.residues()
    mgrid = np.arange(1, n + 1, dtype=np.int64)
    chunk = max(1, min(n, (1 << 21) // n))
    inv_n2 = 1.0 / (n * n)

    if summation == "stable":
        D = np.zeros((n, n))
        D0 = np.zeros((n, n))
    else:
        P = np.ones((n, n))
        P0 = np.ones((n, n))

    ms, e2s, e20s = [], [], []
    for j in range(s_max):
        p = res[:, j]
        g = gamma[j]
        c = 0.5 * _b2((p[:, None] - p[None, :]) % n / n)
        u0 = p / n - 0.5

        if summation == "stable":
            base = D.sum() + g * (c.sum() + (c * D).sum())

            def scan(a, b, D=D, p=p, g=g, base=base):
                U = _half_shift_rows(p, n, mgrid[a:b])
                quad = U.sum(axis=1) ** 2 + np.einsum("mk,mk->m", U @ D, U)
                return (base + g * quad) * inv_n2

            vals = _map_chunks(scan, n, chunk, jobs)
            best = _argmin_first(vals, tie_rtol)
            u = _half_shift_rows(p, n, mgrid[best:best + 1])[0]
            D += g * (c + np.outer(u, u)) * (1.0 + D)
            D0 += g * (c + np.outer(u0, u0)) * (1.0 + D0)
            e2 = float(vals[best])
            e20 = float(D0.sum() * inv_n2)
        else:
            def scan(a, b, P=P, p=p, g=g, c=c):
                out = np.empty(b - a)
                _plain_scan(P, c, float(g), _half_shift_rows(p, n, mgrid[a:b]), out)
                return out * inv_n2 - 1.0

            vals = _map_chunks(scan, n, max(1, n // (4 * jobs)), jobs)
            best = _argmin_first(vals, tie_rtol)
            u = _half_shift_rows(p, n, mgrid[best:best + 1])[0]
            P = P * (1.0 + g * (c + np.outer(u, u)))
            P0 = P0 * (1.0 + g * (c + np.outer(u0, u0)))
            e2 = float(vals[best])
            e20 = sequential_sum(P0) * inv_n2 - 1.0

        ms.append(best + 1)
        e2s.append(e2)
        e20s.append(e20)
        log.info("cbc_shift: s=%d m=%d kappa=%.6f kappa0=%.6f", j + 1, best + 1,
                 _ratio(e2, esh2[j]), _ratio(e20, esh2[j]))

    kap = tuple(_ratio(e, d) for e, d in zip(e2s, esh2))
    kap0 = tuple(_ratio(e, d) for e, d in zip(e20s, esh2))
    return CbcShiftResult(
        n=n, z=rule.z, m=tuple(ms), e2=tuple(e2s), e2_zero=tuple(e20s),
        esh2=tuple(float(v) for v in esh2), kappa=kap, kappa0=kap0,
        summation=summation, weights=w.truncated(s_max),
    )


def zero_shift_kappas(n: int, z: Sequence[int], s_max: int | None, w: ProductWeights,
                      summation: Summation = "stable") -> np.ndarray:
    """Ratios for the unshifted rule, one per leading dimension ``s = 1..s_max``."""
    z = tuple(z)
    if s_max is None:
        s_max = len(z)
    if len(z) < s_max:
        raise ValueError(f"generating vector has {len(z)} components, need {s_max}")
    rule = LatticeRule(n, z[:s_max])
    e2 = squared_wce_profile(rule, np.zeros(s_max), w, summation)
    esh2 = shift_avg_profile(rule, w, summation)
    return np.array([_ratio(a, b) for a, b in zip(e2, esh2)])
