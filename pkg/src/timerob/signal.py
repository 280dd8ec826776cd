"""Finite discrete-time signals, predicate traces and time shifts.

A :class:`Trace` holds real samples ``x_0 .. x_H``. Evaluating a list of
predicates on it gives an :class:`ApTrace`, the +/-1 matrix that the shift
operators and the monitor work on.

Shifted traces only exist on the overlap of the original and the moved copy.
Early shifts re-index from zero. Late shifts keep absolute time and record it
in ``start``: column ``i`` of a trace with ``start = s`` is time ``s + i``.
"""
from __future__ import annotations

import csv
import enum
import io
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .formula import FormulaError, Predicate


class ShiftError(ValueError):
    pass


class Direction(enum.Enum):
    EARLY = "early"
    LATE = "late"

    @classmethod
    def coerce(cls, d) -> "Direction":
        return d if isinstance(d, cls) else cls(str(d).lower())


@dataclass(frozen=True, eq=False)
class Trace:
    """Samples of an ``n``-dimensional signal at ``t = start .. start + H``."""

    samples: np.ndarray
    names: Optional[tuple[str, ...]] = None
    start: int = 0

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if s.ndim != 2 or s.shape[0] == 0 or s.shape[1] == 0:
            raise ValueError(f"samples must be a non-empty (H+1) x n matrix, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("trace samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != s.shape[1]:
                raise ValueError(f"{len(names)} names for {s.shape[1]} dimensions")
            object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def horizon(self) -> int:
        return self.samples.shape[0] - 1

    def __eq__(self, other):
        return (
            isinstance(other, Trace)
            and self.start == other.start
            and self.samples.shape == other.samples.shape
            and bool(np.array_equal(self.samples, other.samples))
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class ApTrace:
    """Per-predicate sign matrix of shape ``L x (H+1)``."""

    predicates: tuple[Predicate, ...]
    values: np.ndarray
    start: int = 0
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        preds = tuple(self.predicates)
        v = np.array(self.values, dtype=np.int8)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[0] != len(preds) or v.shape[1] == 0:
            raise ValueError(f"values shape {v.shape} does not match {len(preds)} predicates")
        if not np.all(np.abs(v) == 1):
            raise ValueError("ApTrace entries must be exactly +1 or -1")
        v.setflags(write=False)
        object.__setattr__(self, "predicates", preds)
        object.__setattr__(self, "values", v)
        idx = {}
        for k, p in enumerate(preds):
            if p.name in idx:
                raise ValueError(f"duplicate predicate {p.name!r}")
            idx[p.name] = k
        object.__setattr__(self, "_index", idx)

    @classmethod
    def from_rows(cls, rows: dict, start: int = 0) -> "ApTrace":
        """Build from ``{name: signs}``; predicates get no coefficients."""
        preds = tuple(Predicate(n, ()) for n in rows)
        return cls(preds, np.array([list(r) for r in rows.values()]), start)

    @property
    def horizon(self) -> int:
        return self.values.shape[1] - 1

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.predicates)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise FormulaError(f"predicate {name!r} is not in the trace") from None

    def row(self, name: str) -> np.ndarray:
        return self.values[self.index(name)]

    def __eq__(self, other):
        return (
            isinstance(other, ApTrace)
            and self.names == other.names
            and self.start == other.start
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class ShiftVector:
    shifts: tuple[int, ...]
    direction: Direction = Direction.EARLY

    def __post_init__(self):
        sh = tuple(int(h) for h in self.shifts)
        if any(h < 0 for h in sh):
            raise ShiftError(f"shifts must be nonnegative: {sh}")
        object.__setattr__(self, "shifts", sh)
        object.__setattr__(self, "direction", Direction.coerce(self.direction))


def evaluate_predicates(trace: Trace, preds: Sequence[Predicate]) -> ApTrace:
    """Sign matrix of the predicates along the trace; sign(0) is +1."""
    preds = tuple(preds)
    if not preds:
        raise ValueError("need at least one predicate")
    rows = []
    for p in preds:
        if p.dim != trace.dim:
            raise FormulaError(
                f"predicate {p.name!r} has dimension {p.dim}, trace has {trace.dim}"
            )
        rows.append(np.where(p.value(trace.samples) >= 0.0, 1, -1))
    return ApTrace(preds, np.array(rows, dtype=np.int8), trace.start)


def shift_sync(apt: ApTrace, h: int, direction=Direction.EARLY) -> ApTrace:
    """Move every predicate row by ``h`` steps."""
    return shift_async(apt, ShiftVector((h,) * len(apt.predicates), direction))


def shift_async(apt: ApTrace, shifts: ShiftVector) -> ApTrace:
    """Move row ``k`` by ``shifts.shifts[k]`` steps, keeping the common window."""
    if len(shifts.shifts) != len(apt.predicates):
        raise ShiftError(f"{len(shifts.shifts)} shifts for {len(apt.predicates)} predicates")
    H = apt.horizon
    hs = np.asarray(shifts.shifts, dtype=int)
    hmax = int(hs.max()) if hs.size else 0
    if hmax > H:
        raise ShiftError(f"shift {hmax} exceeds horizon {H}")
    n = H - hmax + 1
    if shifts.direction is Direction.EARLY:
        rows = [apt.values[k, h : h + n] for k, h in enumerate(hs)]
        return ApTrace(apt.predicates, np.array(rows), apt.start)
    rows = [apt.values[k, hmax - h : hmax - h + n] for k, h in enumerate(hs)]
    return ApTrace(apt.predicates, np.array(rows), apt.start + hmax)


def cluster_shift(trace: Trace, clusters: Sequence[Sequence[int]], shifts: Sequence[int],
                  direction=Direction.EARLY) -> Trace:
    """Shift each group of state dimensions by its own amount.

    ``clusters`` must partition ``range(trace.dim)`` (0-based indices).
    """
    direction = Direction.coerce(direction)
    owner = _cluster_owner(clusters, trace.dim)
    if len(shifts) != len(clusters):
        raise ShiftError(f"{len(shifts)} shifts for {len(clusters)} clusters")
    ks = [int(k) for k in shifts]
    if any(k < 0 for k in ks):
        raise ShiftError("shifts must be nonnegative")
    H = trace.horizon
    kmax = max(ks)
    if kmax > H:
        raise ShiftError(f"shift {kmax} exceeds horizon {H}")
    n = H - kmax + 1
    out = np.empty((n, trace.dim))
    for d in range(trace.dim):
        k = ks[owner[d]]
        lo = k if direction is Direction.EARLY else kmax - k
        out[:, d] = trace.samples[lo : lo + n, d]
    start = trace.start if direction is Direction.EARLY else trace.start + kmax
    return Trace(out, trace.names, start)


def cluster_shift_vector(preds: Sequence[Predicate], clusters: Sequence[Sequence[int]],
                         shifts: Sequence[int], direction=Direction.EARLY) -> ShiftVector:
    """Per-predicate shifts induced by per-cluster shifts.

    Raises if a predicate reads dimensions from two clusters, since its sign
    trace is then not a shifted copy of anything.
    """
    dim = sum(len(c) for c in clusters)
    owner = _cluster_owner(clusters, dim)
    hs = []
    for p in preds:
        used = {owner[d] for d in p.support()}
        if len(used) > 1:
            raise ShiftError(f"predicate {p.name!r} spans clusters {sorted(used)}")
        hs.append(shifts[used.pop()] if used else 0)
    return ShiftVector(tuple(hs), direction)


def _cluster_owner(clusters, dim) -> dict[int, int]:
    owner: dict[int, int] = {}
    for c, dims in enumerate(clusters):
        for d in dims:
            if d in owner:
                raise ShiftError(f"dimension {d} appears in two clusters")
            owner[int(d)] = c
    if sorted(owner) != list(range(dim)):
        raise ShiftError(f"clusters do not partition dimensions 0..{dim - 1}")
    return owner


# -- CSV -------------------------------------------------------------------

def _read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "t" or len(header) < 2:
        raise ValueError(f"{path}: header must start with 't' followed by columns")
    body = rows[1:]
    if not body:
        raise ValueError(f"{path}: no samples")
    ts, data = [], []
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise ValueError(f"{path}:{i}: expected {len(header)} fields, got {len(r)}")
        ts.append(int(r[0]))
        data.append([float(c) for c in r[1:]])
    if ts != list(range(ts[0], ts[0] + len(ts))):
        raise ValueError(f"{path}: time column must be contiguous")
    return header[1:], ts[0], np.array(data)


def read_trace_csv(path) -> Trace:
    names, t0, data = _read_table(path)
    if t0 != 0:
        raise ValueError(f"{path}: time column must start at 0")
    return Trace(data, tuple(names))


def read_apt_csv(path, predicates: Optional[Sequence[Predicate]] = None) -> ApTrace:
    names, t0, data = _read_table(path)
    if predicates is None:
        preds = tuple(Predicate(n, ()) for n in names)
    else:
        by_name = {p.name: p for p in predicates}
        preds = tuple(by_name.get(n) or Predicate(n, ()) for n in names)
    return ApTrace(preds, data.T.astype(np.int8), t0)


def _num(v: float) -> str:
    return repr(float(v)) if not float(v).is_integer() else str(int(v))


def trace_csv_text(trace: Trace) -> str:
    names = trace.names or tuple(f"x{i + 1}" for i in range(trace.dim))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", *names])
    for i, row in enumerate(trace.samples):
        w.writerow([trace.start + i, *(_num(v) for v in row)])
    return buf.getvalue()


def apt_csv_text(apt: ApTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", *apt.names])
    for i in range(apt.horizon + 1):
        w.writerow([apt.start + i, *(int(v) for v in apt.values[:, i])])
    return buf.getvalue()


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trace_csv(trace: Trace, path) -> None:
    atomic_write(path, trace_csv_text(trace))


def write_apt_csv(apt: ApTrace, path) -> None:
    atomic_write(path, apt_csv_text(apt))
