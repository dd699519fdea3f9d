"""Weight schemes for the weighted unanchored Sobolev space."""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "ProductWeights",
    "SubsetWeights",
    "product_weight_of",
    "family_weights",
    "parse_weight_spec",
]


@dataclass(frozen=True)
class ProductWeights:
    """Coordinate weights ``gamma_1, ..., gamma_s``; subset weights are products.

    ``family`` is a human readable tag such as ``"1/j^2"`` or ``"geo:0.5"``.
    """

    gamma: tuple[float, ...]
    family: str = "explicit"

    def __post_init__(self):
        g = tuple(float(v) for v in self.gamma)
        if not g:
            raise ValueError("need at least one weight")
        for v in g:
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"product weights must be positive, got {v!r}")
        object.__setattr__(self, "gamma", g)

    def __len__(self) -> int:
        return len(self.gamma)

    def array(self, s: int | None = None) -> np.ndarray:
        if s is None:
            s = len(self.gamma)
        if s > len(self.gamma):
            raise ValueError(f"weights materialised only up to s={len(self.gamma)}, need {s}")
        return np.asarray(self.gamma[:s], dtype=float)

    def truncated(self, s: int) -> "ProductWeights":
        return ProductWeights(tuple(self.array(s)), self.family)

    def scaled(self, factor: float) -> "ProductWeights":
        return ProductWeights(tuple(factor * g for g in self.gamma), f"{factor}*{self.family}")


@dataclass(frozen=True)
class SubsetWeights:
    """Explicit weight for every nonempty subset of ``{1, ..., s}``.

    Keys are frozensets of 1-based coordinate indices. Only meant for small
    ``s``: the reference evaluators enumerate all ``2**s - 1`` subsets.
    """

    s: int
    values: Mapping[frozenset, float] = field(default_factory=dict)

    def __post_init__(self):
        vals = {}
        for u, g in self.values.items():
            u = frozenset(int(j) for j in u)
            if not u:
                raise ValueError("the empty set carries the implicit weight 1 and is not stored")
            if not u <= set(range(1, self.s + 1)):
                raise ValueError(f"subset {sorted(u)} not contained in 1..{self.s}")
            g = float(g)
            if not (math.isfinite(g) and g > 0.0):
                raise ValueError(f"subset weights must be positive, got {g!r}")
            vals[u] = g
        object.__setattr__(self, "values", vals)

    def __getitem__(self, u: Iterable[int]) -> float:
        # subsets that were not listed carry weight zero
        return self.values.get(frozenset(u), 0.0)

    def subsets(self):
        """All nonempty subsets in a fixed order (by size, then lexicographic)."""
        for r in range(1, self.s + 1):
            for u in itertools.combinations(range(1, self.s + 1), r):
                yield u

    @classmethod
    def from_product(cls, w: ProductWeights, s: int) -> "SubsetWeights":
        g = w.array(s)
        vals = {}
        for r in range(1, s + 1):
            for u in itertools.combinations(range(1, s + 1), r):
                vals[frozenset(u)] = float(np.prod([g[j - 1] for j in u]))
        return cls(s, vals)


def product_weight_of(u: Iterable[int], w: ProductWeights) -> float:
    """``gamma_u = prod_{j in u} gamma_j`` for a nonempty subset ``u`` (1-based)."""
    u = sorted(set(int(j) for j in u))
    if not u:
        raise ValueError("empty subset: its weight is the constant 1 and is handled by callers")
    if u[0] < 1 or u[-1] > len(w):
        raise ValueError(f"subset {u} not within 1..{len(w)}")
    out = 1.0
    for j in u:
        out *= w.gamma[j - 1]
    return out


def family_weights(kind: str, s_max: int, a: float | None = None,
                   values: Sequence[float] | None = None) -> ProductWeights:
    """Materialise one of the standard product-weight families.

    ``kind`` is ``"1/j^2"`` (``gamma_j = j**-2``), ``"geo"`` (``gamma_j = a**j``
    with ``0 < a < 1``) or ``"explicit"`` (``values`` taken verbatim).
    """
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    if kind in ("1/j^2", "inv_j2", "1/j2"):
        j = np.arange(1, s_max + 1, dtype=float)
        return ProductWeights(tuple(1.0 / (j * j)), "1/j^2")
    if kind in ("geo", "a^j"):
        if a is None or not 0.0 < a < 1.0:
            raise ValueError(f"geometric weights need 0 < a < 1, got {a!r}")
        return ProductWeights(tuple(a ** j for j in range(1, s_max + 1)), f"geo:{a:g}")
    if kind == "explicit":
        if values is None or len(values) < s_max:
            n = 0 if values is None else len(values)
            raise ValueError(f"explicit weights: need {s_max} values, got {n}")
        return ProductWeights(tuple(values[:s_max]), "explicit")
    raise ValueError(f"unknown weight family {kind!r}")


_EXPLICIT_RE = re.compile(r"^explicit:(\[.*\])$")


def parse_weight_spec(spec: str, s_max: int) -> ProductWeights:
    """Parse a weight string as accepted on the command line.

    Recognised forms::

        prod:1/j^2          gamma_j = 1/j^2
        prod:geo:0.5        gamma_j = 0.5^j
        prod:file:<path>    one gamma_j per line
        explicit:[1,0.5]    literal list
    """
    spec = spec.strip()
    if spec in ("prod:1/j^2", "prod:1/j2"):
        return family_weights("1/j^2", s_max)
    if spec.startswith("prod:geo:"):
        try:
            a = float(spec[len("prod:geo:"):])
        except ValueError:
            raise ValueError(f"bad geometric weight base in {spec!r}") from None
        return family_weights("geo", s_max, a=a)
    if spec.startswith("prod:file:"):
        path = Path(spec[len("prod:file:"):])
        vals = []
        for lineno, line in enumerate(path.read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                vals.append(float(line))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
        w = family_weights("explicit", s_max, values=vals)
        return ProductWeights(w.gamma, f"file:{path.name}")
    m = _EXPLICIT_RE.match(spec)
    if m:
        try:
            vals = json.loads(m.group(1))
        except json.JSONDecodeError:
            raise ValueError(f"bad explicit weight list in {spec!r}") from None
        return family_weights("explicit", s_max, values=[float(v) for v in vals])
    raise ValueError(f"unrecognised weight specification {spec!r}")
