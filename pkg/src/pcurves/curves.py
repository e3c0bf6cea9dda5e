"""Persistence curves ``P(D, psi, T)(t) = T({psi(D; b, d, t) : b <= t < d})``.

A curve is parameterized by a weight function ``psi`` of a diagram point
(optionally depending on ``t``) and a statistic ``T`` that reduces the
multiset of weights inside the window at ``t`` to a number. The named
curves below are all instances of :func:`evaluate_curve`.

Conventions: the window is half open (``b <= t < d``); entropy
normalizers are totals over the whole diagram; logarithms are natural;
the multiplicative life ``d / b`` is evaluated as ``(d + 1) / (b + 1)``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .persistence import PersistenceDiagram

#: offset added to birth and death before taking the ratio d / b
MUL_OFFSET = 1.0

DEFAULT_GRID = np.arange(256, dtype=float)

# upper bound on window-matrix entries held in memory at once
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class DiagramContext:
    """Whole-diagram totals that some weight functions normalize by."""

    total_life: float
    total_midlife: float
    total_mullife: float
    count: int

    @classmethod
    def of(cls, diagram: PersistenceDiagram) -> "DiagramContext":
        b, d = diagram.births, diagram.deaths
        return cls(
            total_life=float(np.sum(d - b)),
            total_midlife=float(np.sum(d + b)),
            total_mullife=float(np.sum((d + MUL_OFFSET) / (b + MUL_OFFSET))),
            count=len(diagram),
        )


PsiCallable = Callable[[DiagramContext, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PsiFunction:
    """Weight of a diagram point.

    ``func`` receives broadcastable arrays ``b``, ``d``, ``t``. When
    ``time_dependent`` is False it is called without a meaningful ``t``
    (``t`` is passed as 0) and must return one weight per point.
    Weights of diagonal points are forced to 0.
    """

    name: str
    func: PsiCallable
    time_dependent: bool = False

    def evaluate(self, ctx: DiagramContext, b, d, t=0.0):
        b = np.asarray(b, dtype=float)
        d = np.asarray(d, dtype=float)
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = np.asarray(self.func(ctx, b, d, t), dtype=float)
        diag = b == d
        out = np.where(diag, 0.0, raw)
        return out if out.ndim else float(out)

    def __call__(self, ctx: DiagramContext, b, d, t=0.0):
        return self.evaluate(ctx, b, d, t)


@dataclass(frozen=True)
class Statistic:
    """A reduction of a multiset of reals to a scalar; the empty multiset gives 0."""

    name: str
    reduce: Callable[[np.ndarray], float]
    # column-wise reduction over a weight matrix and a window mask (points x grid)
    reduce_masked: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False, default=None)

    def __call__(self, values) -> float:
        return float(self.reduce(np.asarray(values, dtype=float)))

    def columns(self, weights: np.ndarray, mask: np.ndarray) -> np.ndarray:
        if self.reduce_masked is not None:
            return self.reduce_masked(weights, mask)
        return np.array([self.reduce(weights[mask[:, j], j]) for j in range(mask.shape[1])])


def _sum(values: np.ndarray) -> float:
    return float(np.sum(values)) if values.size else 0.0


def _mean(values: np.ndarray) -> float:
    return float(np.mean(values)) if values.size else 0.0


SUM = Statistic("sum", _sum, lambda w, m: np.where(m, w, 0.0).sum(axis=0))


def _masked_mean(w: np.ndarray, m: np.ndarray) -> np.ndarray:
    total = np.where(m, w, 0.0).sum(axis=0)
    count = m.sum(axis=0)
    return np.divide(total, count, out=np.zeros_like(total), where=count > 0)


MEAN = Statistic("mean", _mean, _masked_mean)


def max_k(k: int) -> Statistic:
    """k-th largest element; 0 when fewer than k elements are present."""
    if k < 1:
        raise ValueError("k must be a positive integer")

    def reduce(values: np.ndarray) -> float:
        if values.size < k:
            return 0.0
        return float(np.partition(values, values.size - k)[values.size - k])

    def reduce_masked(w: np.ndarray, m: np.ndarray) -> np.ndarray:
        n = w.shape[0]
        if n < k:
            return np.zeros(w.shape[1])
        filled = np.where(m, w, -np.inf)
        kth = np.partition(filled, n - k, axis=0)[n - k]
        return np.where(np.isfinite(kth), kth, 0.0)

    return Statistic(f"max_{k}", reduce, reduce_masked)


# -- weight functions ---------------------------------------------------------

def _entropy_term(share: np.ndarray) -> np.ndarray:
    return np.where(share > 0, -share * np.log(np.where(share > 0, share, 1.0)), 0.0)


PSI_ONE = PsiFunction("one", lambda ctx, b, d, t: np.ones(np.broadcast(b, d).shape))
PSI_LIFE = PsiFunction("life", lambda ctx, b, d, t: d - b)
PSI_MIDLIFE = PsiFunction("midlife", lambda ctx, b, d, t: (b + d) / 2.0)
PSI_MULLIFE = PsiFunction(
    "mullife", lambda ctx, b, d, t: (d + MUL_OFFSET) / (b + MUL_OFFSET))
PSI_LIFE_ENTROPY = PsiFunction(
    "life_entropy", lambda ctx, b, d, t: _entropy_term((d - b) / ctx.total_life))
PSI_MIDLIFE_ENTROPY = PsiFunction(
    "midlife_entropy", lambda ctx, b, d, t: _entropy_term((d + b) / ctx.total_midlife))
PSI_MULLIFE_ENTROPY = PsiFunction(
    "mullife_entropy",
    lambda ctx, b, d, t: _entropy_term(((d + MUL_OFFSET) / (b + MUL_OFFSET)) / ctx.total_mullife))
PSI_TENT = PsiFunction("tent", lambda ctx, b, d, t: np.minimum(t - b, d - t), time_dependent=True)
PSI_PHI = PsiFunction("phi", lambda ctx, b, d, t: (d - t) * (t - b), time_dependent=True)
# life over midlife; blows up for short-lived points near 0
PSI_LIFE_MIDLIFE_RATIO = PsiFunction(
    "life_midlife_ratio", lambda ctx, b, d, t: (d - b) / ((b + d) / 2.0))


# -- curves -------------------------------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function: ``values[k]`` on ``[breaks[k], breaks[k+1])``, 0 elsewhere."""

    breaks: np.ndarray
    values: np.ndarray

    def __call__(self, t) -> np.ndarray:
        idx = np.searchsorted(self.breaks, np.asarray(t, dtype=float), side="right") - 1
        # index -1 (before the first break) and len(values) (after the last) both hit the 0
        return np.append(self.values, 0.0)[idx]


@dataclass(frozen=True, eq=False)
class PersistenceCurve:
    """Curve values sampled on ``grid``.

    Curves of the sum statistic with time-independent weights keep their
    (diagram, psi) source so the exact step form is available as ``steps``.
    """

    grid: np.ndarray
    values: np.ndarray
    provenance: dict = field(default_factory=dict)
    source: tuple | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values differ in length")

    @cached_property
    def steps(self) -> StepFunction | None:
        if self.source is None:
            return None
        return step_function(*self.source)

    def __len__(self) -> int:
        return int(self.grid.size)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(DEFAULT_GRID if grid is None else grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty grid")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return grid


def step_function(diagram: PersistenceDiagram, psi: PsiFunction) -> StepFunction:
    """Exact piecewise-constant form of ``P(D, psi, sum)`` for time-independent ``psi``."""
    if psi.time_dependent:
        raise ValueError(f"{psi.name} depends on t; no finite step form")
    b, d = diagram.births, diagram.deaths
    if not diagram.is_finite:
        raise ValueError("diagram has infinite deaths; cap it first")
    if len(diagram) == 0:
        return StepFunction(np.empty(0), np.empty(0))
    w = np.asarray(psi.evaluate(DiagramContext.of(diagram), b, d), dtype=float)
    breaks = np.unique(np.concatenate([b, d]))
    # weight enters at its birth, leaves at its death
    delta = np.zeros(breaks.size)
    np.add.at(delta, np.searchsorted(breaks, b), w)
    np.add.at(delta, np.searchsorted(breaks, d), -w)
    values = np.cumsum(delta)[:-1]
    return StepFunction(breaks, values)


def evaluate_curve(diagram: PersistenceDiagram, psi: PsiFunction, stat: Statistic,
                   grid=None, diagram_id: str | None = None) -> PersistenceCurve:
    grid = _check_grid(grid)
    if not diagram.is_finite:
        raise ValueError("diagram has infinite deaths; cap it first")
    provenance = {"diagram": diagram_id, "dimension": diagram.dimension, "psi": psi.name,
                  "statistic": stat.name, "death_cap": diagram.death_cap}
    if psi.name in ("mullife", "mullife_entropy"):
        provenance["mul_offset"] = MUL_OFFSET
    n = len(diagram)
    source = (diagram, psi) if (stat is SUM and not psi.time_dependent) else None
    if n == 0:
        return PersistenceCurve(grid, np.zeros(grid.size), provenance, source)
    ctx = DiagramContext.of(diagram)
    b = diagram.births[:, None]
    d = diagram.deaths[:, None]
    static = None if psi.time_dependent else np.asarray(psi.evaluate(ctx, b[:, 0], d[:, 0]))

    out = np.empty(grid.size)
    step = max(1, _CHUNK_ELEMENTS // n)
    for lo in range(0, grid.size, step):
        t = grid[None, lo:lo + step]
        mask = (b <= t) & (d > t)
        if static is not None and stat is SUM:
            out[lo:lo + step] = static @ mask
            continue
        w = psi.evaluate(ctx, b, d, t) if static is None else np.broadcast_to(static[:, None], mask.shape)
        out[lo:lo + step] = stat.columns(w, mask)
    return PersistenceCurve(grid, out, provenance, source)


def betti_curve(diagram, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_ONE, SUM, grid)


def life_curve(diagram, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_LIFE, SUM, grid)


def midlife_curve(diagram, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_MIDLIFE, SUM, grid)


def mul_curve(diagram, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_MULLIFE, SUM, grid)


def le_curve(diagram, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_LIFE_ENTROPY, SUM, grid)


def mle_curve(diagram, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_MIDLIFE_ENTROPY, SUM, grid)


def mule_curve(diagram, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_MULLIFE_ENTROPY, SUM, grid)


def life_midlife_curve(diagram, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_LIFE_MIDLIFE_RATIO, SUM, grid)


def landscape_k(diagram, k: int, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_TENT, max_k(k), grid)


def phi_curve(diagram, grid=None) -> PersistenceCurve:
    return evaluate_curve(diagram, PSI_PHI, MEAN, grid)


def ecc(diagrams: Sequence[PersistenceDiagram], grid=None) -> PersistenceCurve:
    """Alternating sum of Betti curves; ``diagrams[i]`` is the dimension-i diagram."""
    grid = _check_grid(grid)
    total = np.zeros(grid.size)
    for i, dgm in enumerate(diagrams):
        total += (-1) ** i * betti_curve(dgm, grid).values
    return PersistenceCurve(grid, total, {"psi": "one", "statistic": "alternating_sum",
                                          "dimensions": len(diagrams)})


def entropy_summary(diagram: PersistenceDiagram, grid=None) -> PersistenceCurve:
    """Life-entropy weights over the closed window ``b <= t <= d``."""
    grid = _check_grid(grid)
    if len(diagram) == 0:
        return PersistenceCurve(grid, np.zeros(grid.size), {"psi": "life_entropy", "window": "closed"})
    ctx = DiagramContext.of(diagram)
    w = np.asarray(PSI_LIFE_ENTROPY.evaluate(ctx, diagram.births, diagram.deaths))
    mask = (diagram.births[:, None] <= grid[None, :]) & (diagram.deaths[:, None] >= grid[None, :])
    return PersistenceCurve(grid, w @ mask, {"psi": "life_entropy", "window": "closed"})


#: curves selectable by name in feature configs
CURVES: dict[str, Callable[..., PersistenceCurve]] = {
    "betti": betti_curve,
    "life": life_curve,
    "midlife": midlife_curve,
    "mul": mul_curve,
    "le": le_curve,
    "mle": mle_curve,
    "mule": mule_curve,
    "phi": phi_curve,
    "life_midlife": life_midlife_curve,
}
for _k in range(1, 7):
    CURVES[f"landscape{_k}"] = (lambda k: lambda dgm, grid=None: landscape_k(dgm, k, grid))(_k)

#: named (psi, statistic) pairs; each registered curve equals evaluate_curve with these
CURVE_DEFINITIONS: dict[str, tuple[PsiFunction, Statistic]] = {
    "betti": (PSI_ONE, SUM),
    "life": (PSI_LIFE, SUM),
    "midlife": (PSI_MIDLIFE, SUM),
    "mul": (PSI_MULLIFE, SUM),
    "le": (PSI_LIFE_ENTROPY, SUM),
    "mle": (PSI_MIDLIFE_ENTROPY, SUM),
    "mule": (PSI_MULLIFE_ENTROPY, SUM),
    "phi": (PSI_PHI, MEAN),
    "life_midlife": (PSI_LIFE_MIDLIFE_RATIO, SUM),
}

PSI_BY_NAME: dict[str, PsiFunction] = {
    p.name: p for p in (PSI_ONE, PSI_LIFE, PSI_MIDLIFE, PSI_MULLIFE, PSI_LIFE_ENTROPY,
                        PSI_MIDLIFE_ENTROPY, PSI_MULLIFE_ENTROPY, PSI_TENT, PSI_PHI,
                        PSI_LIFE_MIDLIFE_RATIO)
}


# -- persistence statistics ---------------------------------------------------

STATISTIC_NAMES = ("mean", "median", "std", "skewness", "kurtosis", "p10", "p25", "p75", "p90")


def _summary(x: np.ndarray) -> list[float]:
    if x.size == 0:
        return [0.0] * len(STATISTIC_NAMES)
    mean = x.mean()
    centered = x - mean
    var = np.mean(centered ** 2)
    std = np.sqrt(var)
    # degenerate spread: standardized moments are reported as 0
    skew = np.mean(centered ** 3) / var ** 1.5 if var > 0 else 0.0
    kurt = np.mean(centered ** 4) / var ** 2 if var > 0 else 0.0
    p10, p25, p75, p90 = np.percentile(x, [10, 25, 75, 90])
    return [float(v) for v in (mean, np.median(x), std, skew, kurt, p10, p25, p75, p90)]


def persistence_statistics(diagram: PersistenceDiagram) -> np.ndarray:
    """Nine summaries of ``{d + b}`` followed by the same nine of ``{d - b}``.

    Population standard deviation, non-excess kurtosis, linearly
    interpolated percentiles.
    """
    if not diagram.is_finite:
        raise ValueError("diagram has infinite deaths; cap it first")
    b, d = diagram.births, diagram.deaths
    return np.array(_summary(d + b) + _summary(d - b))


def statistic_labels() -> list[str]:
    return [f"{group}_{name}" for group in ("midsum", "life") for name in STATISTIC_NAMES]


# -- serialization ------------------------------------------------------------

def curve_to_csv(curve: PersistenceCurve, path: str | Path | None = None) -> str:
    """``t,value`` rows; with ``path`` also writes ``<path>.json`` carrying provenance."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "value"])
    for t, v in zip(curve.grid, curve.values):
        writer.writerow([repr(float(t)), repr(float(v))])
    text = buf.getvalue()
    if path is not None:
        path = Path(path)
        path.write_text(text)
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(curve.provenance, indent=2))
    return text


def curve_from_csv(path: str | Path) -> PersistenceCurve:
    path = Path(path)
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    sidecar = path.with_suffix(path.suffix + ".json")
    provenance = json.loads(sidecar.read_text()) if sidecar.exists() else {}
    grid = np.array([float(r["t"]) for r in rows])
    values = np.array([float(r["value"]) for r in rows])
    return PersistenceCurve(grid, values, provenance)
