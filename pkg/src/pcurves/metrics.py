"""Exact bottleneck and Wasserstein distances between small diagrams.

Both distances use the diagonal-augmented matching: every point of one
diagram is matched either to a point of the other or to its own nearest
diagonal projection, and leftover diagonal copies match each other at no
cost. The ground metric is the l-infinity norm unless ``ground="l2"``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .curves import PersistenceCurve, StepFunction
from .persistence import PersistenceDiagram

DEFAULT_SIZE_LIMIT = 2000


class CapacityError(ValueError):
    """The diagrams are too large for the exact desk-scale algorithms."""


class CapMismatchError(ValueError):
    """Diagrams carry infinite deaths or were capped at different values."""


@dataclass(frozen=True)
class Matching:
    """Index pairs into (C, D); ``None`` on either side stands for the diagonal."""

    pairs: tuple[tuple[int | None, int | None], ...]
    cost: float


def _check(C: PersistenceDiagram, D: PersistenceDiagram, limit: int) -> None:
    if len(C) + len(D) > limit:
        raise CapacityError(f"{len(C)} + {len(D)} points exceed the limit of {limit}")
    if not (C.is_finite and D.is_finite):
        raise CapMismatchError("cap infinite deaths before computing distances")
    if C.death_cap is not None and D.death_cap is not None and C.death_cap != D.death_cap:
        raise CapMismatchError(f"caps differ: {C.death_cap} vs {D.death_cap}")


def point_distance(p, q, ground: str = "linf") -> float:
    dx, dy = abs(p[0] - q[0]), abs(p[1] - q[1])
    if ground == "linf":
        return float(max(dx, dy))
    if ground == "l2":
        return float(np.hypot(dx, dy))
    raise ValueError(f"unknown ground metric {ground!r}")


def diagonal_distance(b, d, ground: str = "linf"):
    """Distance from (b, d) to the nearest point of the diagonal."""
    life = np.asarray(d, dtype=float) - np.asarray(b, dtype=float)
    if ground == "linf":
        return life / 2.0
    if ground == "l2":
        return life / np.sqrt(2.0)
    raise ValueError(f"unknown ground metric {ground!r}")


def cross_distances(C: PersistenceDiagram, D: PersistenceDiagram, ground: str = "linf") -> np.ndarray:
    db = np.abs(C.births[:, None] - D.births[None, :])
    dd = np.abs(C.deaths[:, None] - D.deaths[None, :])
    if ground == "linf":
        return np.maximum(db, dd)
    if ground == "l2":
        return np.hypot(db, dd)
    raise ValueError(f"unknown ground metric {ground!r}")


def augmented_costs(C: PersistenceDiagram, D: PersistenceDiagram, ground: str = "linf") -> np.ndarray:
    """(n+m) x (n+m) matrix; rows are C then diagonal copies of D, columns D then copies of C.

    Forbidden pairings (a point with someone else's diagonal copy) are +inf.
    """
    n, m = len(C), len(D)
    cost = np.full((n + m, n + m), np.inf)
    cost[:n, :m] = cross_distances(C, D, ground)
    cost[np.arange(n), m + np.arange(n)] = diagonal_distance(C.births, C.deaths, ground)
    cost[n + np.arange(m), np.arange(m)] = diagonal_distance(D.births, D.deaths, ground)
    cost[n:, m:] = 0.0
    return cost


def _decode(assign_rows, assign_cols, n: int, m: int) -> list[tuple[int | None, int | None]]:
    pairs = []
    for r, c in zip(assign_rows, assign_cols):
        r, c = int(r), int(c)
        if r < n and c < m:
            pairs.append((r, c))
        elif r < n:
            pairs.append((r, None))
        elif c < m:
            pairs.append((None, c))
    return pairs


def matching_costs(C: PersistenceDiagram, D: PersistenceDiagram,
                   pairs, ground: str = "linf") -> np.ndarray:
    """Ground distance of each matched pair, recomputed from scratch."""
    out = []
    for i, j in pairs:
        if i is not None and j is not None:
            out.append(point_distance((C.births[i], C.deaths[i]), (D.births[j], D.deaths[j]), ground))
        elif i is not None:
            out.append(float(diagonal_distance(C.births[i], C.deaths[i], ground)))
        elif j is not None:
            out.append(float(diagonal_distance(D.births[j], D.deaths[j], ground)))
    return np.array(out, dtype=float)


def _perfect_matching(allowed: np.ndarray) -> np.ndarray | None:
    graph = csr_matrix(allowed.astype(np.int8))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if np.any(match < 0):
        return None
    return match


def bottleneck(C: PersistenceDiagram, D: PersistenceDiagram, ground: str = "linf",
               size_limit: int = DEFAULT_SIZE_LIMIT, refine: bool = True) -> tuple[float, Matching]:
    """Exact bottleneck distance: binary search over candidate costs with perfect-matching checks.

    With ``refine`` the returned matching is, among all bottleneck-optimal
    ones, one of least total cost. Swapping ``C`` and ``D`` transposes the
    problem, so the refined matching does not depend on argument order
    unless that least-cost matching is itself tied.
    """
    _check(C, D, size_limit)
    n, m = len(C), len(D)
    if n + m == 0:
        return 0.0, Matching((), 0.0)
    cost = augmented_costs(C, D, ground)
    candidates = np.unique(cost[np.isfinite(cost)])
    lo, hi = 0, candidates.size - 1
    best, level = None, None
    while lo <= hi:
        mid = (lo + hi) // 2
        match = _perfect_matching(cost <= candidates[mid])
        if match is None:
            lo = mid + 1
        else:
            best, level, hi = match, candidates[mid], mid - 1
    rows, cols = np.arange(n + m), best
    if refine:
        allowed = cost <= level
        big = cost[allowed].sum() + 1.0
        rows, cols = linear_sum_assignment(np.where(allowed, cost, big))
    pairs = _decode(rows, cols, n, m)
    costs = matching_costs(C, D, pairs, ground)
    value = float(costs.max()) if costs.size else 0.0
    return value, Matching(tuple(pairs), value)


def wasserstein(C: PersistenceDiagram, D: PersistenceDiagram, p: float = 1.0,
                ground: str = "linf", size_limit: int = DEFAULT_SIZE_LIMIT) -> tuple[float, Matching]:
    """Exact W_p by optimal assignment on the augmented cost matrix raised to ``p``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    _check(C, D, size_limit)
    n, m = len(C), len(D)
    if n + m == 0:
        return 0.0, Matching((), 0.0)
    cost = augmented_costs(C, D, ground)
    finite = np.isfinite(cost)
    powered = np.where(finite, cost, 0.0) ** p
    # forbidden entries get a cost no optimal assignment would pay
    big = powered[finite].sum() + 1.0
    powered[~finite] = big
    rows, cols = linear_sum_assignment(powered)
    pairs = _decode(rows, cols, n, m)
    total = float(np.sum(matching_costs(C, D, pairs, ground) ** p))
    value = total ** (1.0 / p)
    return value, Matching(tuple(pairs), value)


def matching_cost(C: PersistenceDiagram, D: PersistenceDiagram, matching: Matching,
                  p: float = np.inf, ground: str = "linf") -> float:
    costs = matching_costs(C, D, matching.pairs, ground)
    if costs.size == 0:
        return 0.0
    if np.isinf(p):
        return float(costs.max())
    return float(np.sum(costs ** p)) ** (1.0 / p)


# -- curves -------------------------------------------------------------------

def step_l1_distance(a: StepFunction, b: StepFunction) -> float:
    """Exact integral of ``|a - b|`` over the real line."""
    breaks = np.union1d(a.breaks, b.breaks)
    if breaks.size < 2:
        return 0.0
    left = breaks[:-1]
    diff = np.abs(a(left) - b(left))
    return float(np.sum(diff * np.diff(breaks)))


def curve_l1_distance(a: PersistenceCurve, b: PersistenceCurve, exact: bool = True) -> float:
    """L1 distance between curves.

    Exact when both curves carry a step form (sum statistic, time-independent
    weights) and ``exact`` is set. Otherwise a left Riemann sum on the shared
    grid, the last sample weighted by the final spacing.
    """
    if exact and a.steps is not None and b.steps is not None:
        return step_l1_distance(a.steps, b.steps)
    if a.grid.shape != b.grid.shape or not np.array_equal(a.grid, b.grid):
        raise ValueError("curves are sampled on different grids and carry no exact breakpoints")
    grid = a.grid
    if grid.size == 1:
        weights = np.ones(1)
    else:
        spacing = np.diff(grid)
        weights = np.append(spacing, spacing[-1])
    return float(np.sum(np.abs(a.values - b.values) * weights))
