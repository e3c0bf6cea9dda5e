"""Persistence diagrams by mod-2 boundary matrix reduction."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .cubical import FilteredComplex

#: default finite stand-in for an infinite death (max grayscale + 1)
DEFAULT_CAP = 256.0


class CapError(ValueError):
    """Raised when an infinite-death cap is below some birth or finite death."""


class PersistencePair(NamedTuple):
    birth: float
    death: float
    dimension: int


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Off-diagonal (birth, death) pairs of one homology dimension.

    Zero-persistence pairs are dropped on construction; the diagonal is
    implicit. ``death_cap`` records the value that replaced infinite deaths.
    """

    births: np.ndarray
    deaths: np.ndarray
    dimension: int = 0
    death_cap: float | None = None

    def __post_init__(self) -> None:
        b = np.asarray(self.births, dtype=float).ravel()
        d = np.asarray(self.deaths, dtype=float).ravel()
        if b.shape != d.shape:
            raise ValueError("births and deaths differ in length")
        if np.any(np.isnan(b)) or np.any(np.isnan(d)) or np.any(np.isinf(b)):
            raise ValueError("births must be finite and deaths non-NaN")
        if np.any(b > d):
            raise ValueError("every pair needs birth <= death")
        keep = b < d
        object.__setattr__(self, "births", _readonly(b[keep]))
        object.__setattr__(self, "deaths", _readonly(d[keep]))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]], dimension: int = 0,
                   death_cap: float | None = None) -> "PersistenceDiagram":
        pairs = [tuple(p[:2]) for p in pairs]
        if not pairs:
            return cls(np.empty(0), np.empty(0), dimension, death_cap)
        b, d = zip(*pairs)
        return cls(np.array(b, float), np.array(d, float), dimension, death_cap)

    @classmethod
    def empty(cls, dimension: int = 0, death_cap: float | None = None) -> "PersistenceDiagram":
        return cls(np.empty(0), np.empty(0), dimension, death_cap)

    def __len__(self) -> int:
        return int(self.births.size)

    @property
    def pairs(self) -> list[PersistencePair]:
        return [PersistencePair(float(b), float(d), self.dimension)
                for b, d in zip(self.births, self.deaths)]

    @property
    def lifespans(self) -> np.ndarray:
        return self.deaths - self.births

    @property
    def is_finite(self) -> bool:
        return not np.any(np.isinf(self.deaths))

    @property
    def n_essential(self) -> int:
        return int(np.count_nonzero(np.isinf(self.deaths)))

    def sorted(self) -> "PersistenceDiagram":
        order = np.lexsort((self.deaths, self.births))
        return PersistenceDiagram(self.births[order], self.deaths[order], self.dimension, self.death_cap)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        a, b = self.sorted(), other.sorted()
        return (a.dimension == b.dimension
                and np.array_equal(a.births, b.births) and np.array_equal(a.deaths, b.deaths))

    def __repr__(self) -> str:
        shown = ", ".join(f"({b:g}, {d:g})" for b, d in zip(self.births[:6], self.deaths[:6]))
        more = ", ..." if len(self) > 6 else ""
        return f"PersistenceDiagram(dim={self.dimension}, [{shown}{more}], cap={self.death_cap})"


def _pairs_from_reduction(complex: FilteredComplex) -> tuple[list[tuple[int, int]], list[int]]:
    """Standard column reduction with clearing; columns are int bitmasks over rows.

    Returns (birth_pos, death_pos) pairs and the positions of unpaired
    positive cells.
    """
    n = len(complex)
    dims = complex.dims
    boundary = complex.boundary
    by_dim = {k: np.flatnonzero(dims == k).tolist() for k in (0, 1, 2)}

    pivot_col: dict[int, int] = {}
    reduced: dict[int, int] = {}
    cleared: set[int] = set()
    pairs = []
    # top dimension first so its pivots can clear edge columns
    for k in (2, 1):
        for j in by_dim[k]:
            if j in cleared:
                continue
            col = 0
            for f in boundary[j]:
                col ^= 1 << f
            while col:
                low = col.bit_length() - 1
                other = pivot_col.get(low)
                if other is None:
                    break
                col ^= reduced[other]
            if col:
                low = col.bit_length() - 1
                pivot_col[low] = j
                reduced[j] = col
                cleared.add(low)
                pairs.append((low, j))
    negative = set(reduced)
    paired = set(pivot_col)
    essential = [p for p in range(n) if p not in negative and p not in paired]
    return pairs, essential


def compute_persistence(complex: FilteredComplex) -> tuple[PersistenceDiagram, PersistenceDiagram]:
    """(D0, D1) of the sublevel filtration; essential classes die at +inf."""
    pairs, essential = _pairs_from_reduction(complex)
    vals = complex.values
    dims = complex.dims
    out: dict[int, tuple[list[float], list[float]]] = {0: ([], []), 1: ([], [])}
    for birth, death in pairs:
        k = int(dims[birth])
        b, d = float(vals[birth]), float(vals[death])
        if b < d:
            out[k][0].append(b)
            out[k][1].append(d)
    for p in essential:
        k = int(dims[p])
        if k > 1:
            # a 2-cycle cannot occur in a planar complex
            raise RuntimeError("unexpected essential class in dimension 2")
        out[k][0].append(float(vals[p]))
        out[k][1].append(math.inf)
    return (PersistenceDiagram(np.array(out[0][0]), np.array(out[0][1]), 0),
            PersistenceDiagram(np.array(out[1][0]), np.array(out[1][1]), 1))


def image_persistence(image) -> tuple[PersistenceDiagram, PersistenceDiagram]:
    from .cubical import build_filtered_complex
    return compute_persistence(build_filtered_complex(image))


def cap_infinite(diagram: PersistenceDiagram, cap: float = DEFAULT_CAP) -> PersistenceDiagram:
    """Replace infinite deaths by ``cap``.

    Capping an already capped diagram with the same value is a no-op; a
    different value is refused since the originally infinite points are no
    longer identifiable.
    """
    if diagram.death_cap is not None:
        if diagram.death_cap != cap:
            raise CapError(f"diagram already capped at {diagram.death_cap}")
        return diagram
    finite = diagram.deaths[np.isfinite(diagram.deaths)]
    if len(diagram) and (cap < diagram.births.max() or (finite.size and cap < finite.max())):
        raise CapError(f"cap {cap} is below a birth or finite death of the diagram")
    deaths = np.where(np.isinf(diagram.deaths), cap, diagram.deaths)
    return PersistenceDiagram(diagram.births, deaths, diagram.dimension, cap)


def betti_at(diagram: PersistenceDiagram, t: float) -> int:
    """Number of points in the window ``b <= t < d``."""
    return int(np.count_nonzero((diagram.births <= t) & (diagram.deaths > t)))


def betti_numbers(diagram: PersistenceDiagram, ts: Sequence[float]) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    b = np.sort(diagram.births)
    d = np.sort(diagram.deaths)
    return np.searchsorted(b, ts, side="right") - np.searchsorted(d, ts, side="right")


# -- CSV serialization -------------------------------------------------------

def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def diagrams_to_csv(diagrams: Sequence[PersistenceDiagram], path: str | Path | None = None) -> str:
    """Write ``dim,birth,death`` rows; infinite deaths as ``inf``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dim", "birth", "death"])
    for dgm in diagrams:
        for b, d in zip(dgm.births, dgm.deaths):
            writer.writerow([dgm.dimension, _fmt(b), _fmt(d)])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def diagrams_from_csv(source: str | Path) -> dict[int, PersistenceDiagram]:
    """Read diagrams written by :func:`diagrams_to_csv`, keyed by dimension."""
    text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["dim", "birth", "death"]:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    acc: dict[int, list[tuple[float, float]]] = {}
    for row in reader:
        acc.setdefault(int(row["dim"]), []).append((float(row["birth"]), float(row["death"])))
    return {k: PersistenceDiagram.from_pairs(v, k) for k, v in sorted(acc.items())}
