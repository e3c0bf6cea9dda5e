"""Timing of curve evaluation against diagram size and grid size."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from ..curves import mule_curve
from ..persistence import PersistenceDiagram


@dataclass(frozen=True)
class BenchmarkSpec:
    diagram_sizes: tuple[int, ...] = (1000,)
    grid_sizes: tuple[int, ...] = (1000,)
    trials: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if any(n < 0 for n in self.diagram_sizes) or any(m < 1 for m in self.grid_sizes):
            raise ValueError("diagram sizes must be >= 0 and grid sizes >= 1")


@dataclass(frozen=True)
class TimingRow:
    diagram_size: int
    grid_size: int
    mean_seconds: float
    trials: int


def benchmark_diagram(rng: np.random.Generator, n: int) -> PersistenceDiagram:
    """Births uniform on [0, 100], each death uniform on [birth, 101]."""
    b = rng.uniform(0.0, 100.0, n)
    return PersistenceDiagram(b, rng.uniform(b, 101.0))


def run_benchmark(spec: BenchmarkSpec, curve=mule_curve) -> list[TimingRow]:
    """Mean wall time of ``curve`` per (diagram size, grid size); generation is not timed."""
    rng = np.random.default_rng(spec.seed)
    rows = []
    for n in spec.diagram_sizes:
        diagrams = [benchmark_diagram(rng, n) for _ in range(spec.trials)]
        for m in spec.grid_sizes:
            grid = np.linspace(0.0, 100.0, m)
            curve(diagrams[0], grid)  # warm-up
            total = 0.0
            for dgm in diagrams:
                start = time.perf_counter()
                curve(dgm, grid)
                total += time.perf_counter() - start
            rows.append(TimingRow(n, m, total / spec.trials, spec.trials))
    return rows


def timing_csv(rows: list[TimingRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["diagram_points", "grid_points", "mean_seconds", "trials"])
    for r in rows:
        writer.writerow([r.diagram_size, r.grid_size, f"{r.mean_seconds:.6g}", r.trials])
    return buf.getvalue()


def doubling_ratios(rows: list[TimingRow], key: str) -> list[float]:
    """Consecutive time ratios along ``key`` ("diagram_size" or "grid_size")."""
    ordered = sorted(rows, key=lambda r: getattr(r, key))
    return [b.mean_seconds / a.mean_seconds for a, b in zip(ordered, ordered[1:])]
