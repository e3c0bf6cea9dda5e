import numpy as np
import pytest

from helpers import brute_force_distances, random_pairs
from pcurves.curves import (PSI_LIFE, PSI_ONE, SUM, betti_curve, evaluate_curve, landscape_k,
                            le_curve)
from pcurves.metrics import (CapacityError, CapMismatchError, augmented_costs, bottleneck,
                             curve_l1_distance, diagonal_distance, matching_cost, wasserstein)
from pcurves.persistence import PersistenceDiagram, cap_infinite

P = PersistenceDiagram.from_pairs


def _small_pairs(seed=40, count=200, max_points=5, integer=False):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n, m = rng.integers(0, max_points + 1, size=2)
        yield (random_pairs(rng, int(n), 0, 20, integer), random_pairs(rng, int(m), 0, 20, integer))


def test_examples():
    C = P([(1, 3), (2, 9)])
    assert bottleneck(C, C)[0] == 0 and wasserstein(C, C)[0] == 0
    assert bottleneck(P([(2, 10)]), PersistenceDiagram.empty())[0] == 4
    assert bottleneck(P([(0, 4)]), P([(1, 4)]))[0] == 1
    assert wasserstein(P([(0, 2)]), PersistenceDiagram.empty(), p=1)[0] == 1
    assert bottleneck(PersistenceDiagram.empty(), PersistenceDiagram.empty())[0] == 0


def test_brute_force_agreement():
    for C, D in _small_pairs():
        want_inf, want_1 = brute_force_distances(C, D, 1.0)
        assert bottleneck(C, D)[0] == want_inf
        assert wasserstein(C, D, 1.0)[0] == pytest.approx(want_1, rel=1e-12, abs=1e-12)


def test_brute_force_agreement_with_ties_and_p2():
    for C, D in _small_pairs(seed=41, count=80, max_points=5, integer=True):
        want_inf, want_2 = brute_force_distances(C, D, 2.0)
        assert bottleneck(C, D)[0] == want_inf
        assert wasserstein(C, D, 2.0)[0] == pytest.approx(want_2, rel=1e-12, abs=1e-12)


def test_metric_axioms():
    rng = np.random.default_rng(42)
    for _ in range(60):
        A, B, C = (random_pairs(rng, int(rng.integers(0, 7)), 0, 20) for _ in range(3))
        for dist in (lambda x, y: bottleneck(x, y)[0], lambda x, y: wasserstein(x, y, 1.0)[0]):
            ab, ba = dist(A, B), dist(B, A)
            assert ab == pytest.approx(ba, abs=1e-12)
            assert dist(A, A) == 0
            assert dist(A, C) <= ab + dist(B, C) + 1e-9
            if len(A) or len(B):
                assert (ab == 0) == (A == B)


def test_matching_validity():
    for C, D in _small_pairs(seed=43, count=100, max_points=12):
        for fn, p in ((bottleneck, np.inf), (lambda c, d: wasserstein(c, d, 1.0), 1.0)):
            value, match = fn(C, D)
            left = [i for i, _ in match.pairs if i is not None]
            right = [j for _, j in match.pairs if j is not None]
            assert sorted(left) == list(range(len(C)))
            assert sorted(right) == list(range(len(D)))
            assert matching_cost(C, D, match, p) == value
            assert match.cost == value


def test_diagonal_shortcut():
    C, D = P([(0, 4), (2, 3)]), P([(1, 7)])
    cost = augmented_costs(C, D)
    # rows: C0, C1, diagonal copy of D0; columns: D0, diagonal copies of C0, C1
    assert cost[0, 0] == 3 and cost[1, 0] == 4
    assert cost[0, 1] == 2 and cost[1, 2] == 0.5 and cost[2, 0] == 3
    assert np.isinf(cost[0, 2]) and np.isinf(cost[1, 1])
    assert np.all(cost[2, 1:] == 0)
    assert diagonal_distance(0, 4) == 2
    assert diagonal_distance(0, 4, "l2") == pytest.approx(4 / np.sqrt(2))


def test_l2_ground():
    assert bottleneck(P([(0, 4)]), P([(1, 5)]), ground="l2")[0] == pytest.approx(np.sqrt(2))
    with pytest.raises(ValueError):
        bottleneck(P([(0, 4)]), P([(1, 5)]), ground="l7")


def test_capacity_and_cap_errors():
    big = random_pairs(np.random.default_rng(44), 30)
    with pytest.raises(CapacityError):
        bottleneck(big, big, size_limit=50)
    with pytest.raises(CapMismatchError):
        bottleneck(P([(0, np.inf)]), P([(0, 3)]))
    a = cap_infinite(P([(0, np.inf)]), 256)
    b = cap_infinite(P([(0, np.inf)]), 300)
    with pytest.raises(CapMismatchError):
        wasserstein(a, b)
    with pytest.raises(ValueError):
        wasserstein(a, a, p=0.5)


def test_curve_l1_examples():
    C, D = P([(0, 4)]), P([(0, 2)])
    grid = np.arange(0, 8.0)
    assert curve_l1_distance(betti_curve(C, grid), betti_curve(C, grid)) == 0
    assert curve_l1_distance(betti_curve(C, grid), betti_curve(D, grid)) == 2


def test_exact_l1_against_dense_riemann():
    rng = np.random.default_rng(45)
    for _ in range(20):
        C, D = random_pairs(rng, 15), random_pairs(rng, 12)
        for psi in (PSI_ONE, PSI_LIFE):
            exact = curve_l1_distance(evaluate_curve(C, psi, SUM, [0.0]),
                                      evaluate_curve(D, psi, SUM, [0.0]))
            errors = []
            for m in (1000, 10000, 100000):
                grid = np.linspace(-1, 102, m)
                a = evaluate_curve(C, psi, SUM, grid)
                b = evaluate_curve(D, psi, SUM, grid)
                dense = curve_l1_distance(a, b, exact=False)
                spacing = grid[1] - grid[0]
                # each breakpoint costs at most one cell of the jump size
                tv = np.abs(np.diff(a.values)).sum() + np.abs(np.diff(b.values)).sum()
                assert abs(dense - exact) <= spacing * tv + 1e-9
                errors.append(abs(dense - exact))
            assert errors[-1] <= errors[0] + 1e-9


def test_sampled_curves_need_a_common_grid():
    d = P([(0, 3)])
    a = le_curve(d, np.arange(5.0))
    b = le_curve(d, np.arange(6.0))
    assert a.steps is not None
    t1 = evaluate_curve(d, PSI_LIFE, SUM, np.arange(5.0))
    with pytest.raises(ValueError):
        curve_l1_distance(landscape_k(d, 1, np.arange(5.0)), landscape_k(d, 1, np.arange(6.0)))
    assert curve_l1_distance(a, b) == 0
    assert curve_l1_distance(t1, t1, exact=False) == 0
