"""Bounds on the L1 distance between persistence curves of two diagrams.

Points are indexed through an optimal bottleneck matching. A point matched
to the diagonal is paired with a phantom partner of weight 0 and lifespan 0.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .curves import PSI_LIFE_ENTROPY, DiagramContext, PsiFunction, step_function
from .metrics import Matching, bottleneck, step_l1_distance
from .persistence import PersistenceDiagram

SLACK = 1e-9


class UnsupportedPsiError(ValueError):
    """The bound only covers weights that do not depend on the threshold."""


@dataclass(frozen=True)
class BoundComponents:
    life_c: float
    life_d: float
    psi_total_c: float
    psi_total_d: float
    max_psi_gap: float


@dataclass(frozen=True)
class StabilityReport:
    lhs: float
    epsilon: float
    w_inf: float
    components: BoundComponents
    satisfied: bool
    premise_satisfied: bool = True
    # the corollary constant as printed, with the second total repeated
    k_tilde_printed: float | None = None
    k_tilde: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def matched_weights(C: PersistenceDiagram, D: PersistenceDiagram, psi: PsiFunction,
                    matching: Matching) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per matched index: (psi^C_i, psi^D_i, life^C_i, life^D_i), diagonal partners as 0."""
    if psi.time_dependent:
        raise UnsupportedPsiError(f"{psi.name} depends on t")
    wc = np.asarray(psi.evaluate(DiagramContext.of(C), C.births, C.deaths), dtype=float).reshape(-1)
    wd = np.asarray(psi.evaluate(DiagramContext.of(D), D.births, D.deaths), dtype=float).reshape(-1)
    lc, ld = C.lifespans, D.lifespans
    rows = []
    for i, j in matching.pairs:
        rows.append((wc[i] if i is not None else 0.0, wd[j] if j is not None else 0.0,
                     lc[i] if i is not None else 0.0, ld[j] if j is not None else 0.0))
    if not rows:
        return (np.zeros(0),) * 4
    return tuple(np.array(col, dtype=float) for col in zip(*rows))


def bound_components(C, D, psi: PsiFunction, matching: Matching) -> BoundComponents:
    pc, pd, lc, ld = matched_weights(C, D, psi, matching)
    gap = float(np.max(np.abs(pc - pd))) if pc.size else 0.0
    return BoundComponents(float(lc.sum()), float(ld.sum()),
                           float(np.abs(pc).sum()), float(np.abs(pd).sum()), gap)


def _resolve_matching(C, D, matching):
    if matching is None:
        return bottleneck(C, D)
    return matching.cost, matching


def theorem1_bound(C: PersistenceDiagram, D: PersistenceDiagram, psi: PsiFunction,
                   matching: Matching | None = None) -> float:
    """``min(L^C g + 2 Psi^D W, L^D g + 2 Psi^C W)`` with ``g = max_i |psi^C_i - psi^D_i|``."""
    w_inf, matching = _resolve_matching(C, D, matching)
    k = bound_components(C, D, psi, matching)
    return min(k.life_c * k.max_psi_gap + 2 * k.psi_total_d * w_inf,
               k.life_d * k.max_psi_gap + 2 * k.psi_total_c * w_inf)


def curve_gap(C: PersistenceDiagram, D: PersistenceDiagram, psi: PsiFunction) -> float:
    """Exact ``||P(C, psi, sum) - P(D, psi, sum)||_1``."""
    return step_l1_distance(step_function(C, psi), step_function(D, psi))


def theorem1_report(C, D, psi: PsiFunction, matching: Matching | None = None) -> StabilityReport:
    w_inf, matching = _resolve_matching(C, D, matching)
    k = bound_components(C, D, psi, matching)
    eps = min(k.life_c * k.max_psi_gap + 2 * k.psi_total_d * w_inf,
              k.life_d * k.max_psi_gap + 2 * k.psi_total_c * w_inf)
    lhs = curve_gap(C, D, psi)
    return StabilityReport(lhs, eps, w_inf, k, lhs <= eps + SLACK)


def corollary_check(C: PersistenceDiagram, D: PersistenceDiagram, psi: PsiFunction, K: float,
                    matching: Matching | None = None) -> StabilityReport:
    """Check ``||P(C) - P(D)||_1 <= K~ W`` given ``max_i |psi^C_i - psi^D_i| <= K W``.

    ``K~ = min(K L^C + 2 Psi^D, K L^D + 2 Psi^C)``. If the premise fails on
    this pair the report says so and ``satisfied`` is False.
    """
    w_inf, matching = _resolve_matching(C, D, matching)
    k = bound_components(C, D, psi, matching)
    k_tilde = min(K * k.life_c + 2 * k.psi_total_d, K * k.life_d + 2 * k.psi_total_c)
    k_printed = min(K * k.life_c + 2 * k.psi_total_d, K * k.life_d + 2 * k.psi_total_d)
    premise = k.max_psi_gap <= K * w_inf + SLACK
    lhs = curve_gap(C, D, psi)
    bound = k_tilde * w_inf
    return StabilityReport(lhs, bound, w_inf, k, premise and lhs <= bound + SLACK,
                           premise_satisfied=premise, k_tilde_printed=k_printed, k_tilde=k_tilde)


@dataclass(frozen=True)
class EntropyBound:
    """The life-entropy bound; ``value`` is None when it is not applicable."""

    value: float | None
    relative_error: float
    lhs: float

    @property
    def applicable(self) -> bool:
        return self.value is not None

    @property
    def satisfied(self) -> bool | None:
        return None if self.value is None else self.lhs <= self.value + SLACK


def entropy_bound(C: PersistenceDiagram, D: PersistenceDiagram,
                  w_inf: float | None = None) -> EntropyBound:
    """``2 r (log(2 r) + L_max log(N) / N)`` with ``r = 2 N W / L_max``.

    Not applicable (``value=None``) when ``r = 0`` or the expression is not
    positive.
    """
    if len(C) == 0 or len(D) == 0:
        raise ValueError("entropy bound needs two non-empty diagrams")
    if w_inf is None:
        w_inf, _ = bottleneck(C, D)
    n = max(len(C), len(D))
    l_max = max(float(C.lifespans.sum()), float(D.lifespans.sum()))
    r = 2.0 * n * w_inf / l_max
    lhs = curve_gap(C, D, PSI_LIFE_ENTROPY)
    if r <= 0:
        return EntropyBound(None, r, lhs)
    value = 2.0 * r * (math.log(2.0 * r) + l_max * math.log(n) / n)
    if not value > 0:
        return EntropyBound(None, r, lhs)
    return EntropyBound(value, r, lhs)


def random_diagram(rng: np.random.Generator, n_points: int, low: float = 0.0,
                   high: float = 100.0) -> PersistenceDiagram:
    """Births uniform on [low, high), deaths uniform on [birth, high + 1)."""
    b = rng.uniform(low, high, n_points)
    d = rng.uniform(b, high + 1.0)
    return PersistenceDiagram(b, d)


def perturb_diagram(rng: np.random.Generator, diagram: PersistenceDiagram,
                    delta: float, low: float = 0.0) -> PersistenceDiagram:
    """Jitter births and deaths by up to ``delta``; births stay >= ``low`` and below deaths."""
    b = np.maximum(diagram.births + rng.uniform(-delta, delta, len(diagram)), low)
    d = np.maximum(diagram.deaths + rng.uniform(-delta, delta, len(diagram)), b)
    return PersistenceDiagram(b, d)


def stability_fuzz(pairs: int, seed: int, psi: PsiFunction, max_points: int = 50,
                   integer: bool = False) -> list[StabilityReport]:
    """Theorem bound on random diagram pairs, one shared bottleneck matching per pair.

    Odd-numbered pairs are independent draws; even-numbered pairs jitter one
    diagram, which keeps the bottleneck distance small.
    """
    rng = np.random.default_rng(seed)
    out = []
    for k in range(pairs):
        n, m = rng.integers(0, max_points + 1, size=2)
        C = random_diagram(rng, int(n))
        if k % 2 == 0:
            D = perturb_diagram(rng, C, float(rng.uniform(0.05, 2.0)))
        else:
            D = random_diagram(rng, int(m))
        if integer:
            C = PersistenceDiagram(np.floor(C.births), np.ceil(C.deaths))
            D = PersistenceDiagram(np.floor(D.births), np.ceil(D.deaths))
        out.append(theorem1_report(C, D, psi))
    return out
