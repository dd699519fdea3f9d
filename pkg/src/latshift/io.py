"""File formats: generating vectors, shift files and shift tables."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .cbc import CbcShiftResult
from .kernel import HalfShift

__all__ = [
    "VectorFile",
    "ShiftTable",
    "load_vector_file",
    "read_vector_file",
    "write_vector_file",
    "file_digest",
    "shift_table_from_result",
    "emit_shift_table",
    "parse_shift_table",
    "format_shift_file",
    "parse_shift_file",
]

FORMATS = ("csv", "tsv", "json")


@dataclass(frozen=True)
class VectorFile:
    path: Path
    z: tuple[int, ...]
    layout: str  # "single" or "indexed"
    digest: str


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_vector_file(path: str | Path) -> VectorFile:
    """Parse a generating-vector file without range checks.

    Two layouts are accepted: one integer per line, or ``index value`` with
    indices ``1, 2, 3, ...``. Blank lines and ``#`` comments are skipped.
    Mixed layouts are rejected.
    """
    path = Path(path)
    values: list[int] = []
    layout = None
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        this = {1: "single", 2: "indexed"}.get(len(parts))
        if this is None:
            raise ValueError(f"{path}:{lineno}: expected 1 or 2 columns, got {len(parts)}")
        if layout is None:
            layout = this
        elif layout != this:
            raise ValueError(f"{path}:{lineno}: column count changes from earlier lines")
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not an integer: {line!r}") from None
        if layout == "indexed":
            if nums[0] != len(values) + 1:
                raise ValueError(f"{path}:{lineno}: index {nums[0]}, expected {len(values) + 1}")
            values.append(nums[1])
        else:
            values.append(nums[0])
    if not values:
        raise ValueError(f"{path}: no generating vector components found")
    return VectorFile(path, tuple(values), layout, file_digest(path))


def load_vector_file(path: str | Path, n: int, s_max: int | None = None) -> tuple[int, ...]:
    """First ``s_max`` components of a generating vector, range-checked against ``n``.

    Components must lie in ``1..n-1``.
    """
    vf = read_vector_file(path)
    z = vf.z if s_max is None else vf.z[:s_max]
    if s_max is not None and len(z) < s_max:
        raise ValueError(f"{path}: {len(vf.z)} components, need {s_max}")
    for j, v in enumerate(z, 1):
        if not 1 <= v <= n - 1:
            raise ValueError(f"{path}: component {j} is {v}, outside 1..{n - 1} for n={n}")
    return z


def write_vector_file(path: str | Path | None, z: Sequence[int]) -> str:
    text = "".join(f"{int(v)}\n" for v in z)
    if path is not None:
        Path(path).write_text(text)
    return text


@dataclass
class ShiftTable:
    """Rows ``(s, m_s, kappa, kappa0)`` plus provenance metadata."""

    rows: list[tuple[int, int, float, float]]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for s, m, k, k0 in self.rows:
            if not (math.isfinite(k) and math.isfinite(k0) and k > 0 and k0 > 0):
                raise ValueError(f"row s={s}: kappa values must be finite and positive")

    @property
    def m(self) -> tuple[int, ...]:
        return tuple(r[1] for r in self.rows)

    @property
    def kappa(self) -> tuple[float, ...]:
        return tuple(r[2] for r in self.rows)

    @property
    def kappa0(self) -> tuple[float, ...]:
        return tuple(r[3] for r in self.rows)


def shift_table_from_result(result: CbcShiftResult, z_file: str | Path | None = None,
                            weights_spec: str | None = None) -> ShiftTable:
    if len(result) == 0:
        raise ValueError("empty shift construction result")
    meta = {
        "n": result.n,
        "s_max": len(result),
        "weights": weights_spec or result.weights.family,
        "summation": result.summation,
    }
    if z_file is not None:
        meta["z_file"] = str(z_file)
        meta["z_digest"] = file_digest(z_file)
    rows = [(s, m, k, k0) for s, m, k, k0 in result.rows()]
    return ShiftTable(rows, meta)


def emit_shift_table(table: ShiftTable | CbcShiftResult, fmt: str = "csv") -> bytes:
    """Serialise a shift table as UTF-8 ``csv``, ``tsv`` or ``json``.

    Delimited formats start with ``# key: value`` metadata lines followed
    by the header ``s,m,kappa,kappa0``; kappas carry six decimals. JSON keeps
    full precision.
    """
    if isinstance(table, CbcShiftResult):
        table = shift_table_from_result(table)
    if fmt not in FORMATS:
        raise ValueError(f"unknown table format {fmt!r}; choose from {FORMATS}")
    if not table.rows:
        raise ValueError("empty shift table")
    if fmt == "json":
        doc = {
            "meta": table.meta,
            "rows": [{"s": s, "m": m, "kappa": k, "kappa0": k0} for s, m, k, k0 in table.rows],
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    delim = "," if fmt == "csv" else "\t"
    buf = io.StringIO()
    for key, val in table.meta.items():
        buf.write(f"# {key}: {val}\n")
    w = csv.writer(buf, delimiter=delim, lineterminator="\n")
    w.writerow(["s", "m", "kappa", "kappa0"])
    for s, m, k, k0 in table.rows:
        w.writerow([s, m, f"{k:.6f}", f"{k0:.6f}"])
    return buf.getvalue().encode("utf-8")


def _coerce_meta(val: str):
    try:
        return int(val)
    except ValueError:
        return val


def parse_shift_table(data: bytes | str, fmt: str | None = None) -> ShiftTable:
    """Inverse of :func:`emit_shift_table`; the format is sniffed if not given."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else ("tsv" if "\t" in text else "csv")
    if fmt == "json":
        doc = json.loads(text)
        rows = [(int(r["s"]), int(r["m"]), float(r["kappa"]), float(r["kappa0"])) for r in doc["rows"]]
        return ShiftTable(rows, dict(doc.get("meta", {})))
    if fmt not in FORMATS:
        raise ValueError(f"unknown table format {fmt!r}")
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            meta[key.strip()] = _coerce_meta(val.strip())
        elif line.strip():
            body.append(line)
    reader = csv.reader(body, delimiter="," if fmt == "csv" else "\t")
    header = next(reader)
    if header != ["s", "m", "kappa", "kappa0"]:
        raise ValueError(f"unexpected table header {header}")
    rows = [(int(s), int(m), float(k), float(k0)) for s, m, k, k0 in reader]
    return ShiftTable(rows, meta)


def format_shift_file(shift: HalfShift) -> str:
    """One ``s m delta`` line per coordinate; ``delta`` to 17 significant digits."""
    return "".join(f"{s} {m} {d:.17g}\n" for s, (m, d) in enumerate(zip(shift.m, shift.delta), 1))


def parse_shift_file(path: str | Path, n: int) -> HalfShift | list[float]:
    """Read a shift file.

    Three-column ``s m delta`` lines give a :class:`HalfShift` (the indices
    are authoritative, ``delta`` is only checked); single-column lines give
    raw real shift components.
    """
    path = Path(path)
    ms, reals = [], []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if len(parts) == 3:
                s, m, d = int(parts[0]), int(parts[1]), float(parts[2])
                if s != len(ms) + 1:
                    raise ValueError(f"{path}:{lineno}: dimension {s}, expected {len(ms) + 1}")
                if abs(d - (2 * m - 1) / (2 * n)) > 1e-12:
                    raise ValueError(f"{path}:{lineno}: delta {d} does not match m={m} for n={n}")
                ms.append(m)
            elif len(parts) == 1:
                reals.append(float(parts[0]))
            else:
                raise ValueError(f"{path}:{lineno}: expected 'delta' or 's m delta'")
        except ValueError as exc:
            if str(exc).startswith(str(path)):
                raise
            raise ValueError(f"{path}:{lineno}: malformed line {line!r}") from None
    if ms and reals:
        raise ValueError(f"{path}: mixes half-shift and real-shift lines")
    if ms:
        return HalfShift(n, ms)
    if not reals:
        raise ValueError(f"{path}: empty shift file")
    return reals
