"""Fixture builders and independent oracles shared by the test modules."""

from __future__ import annotations

import itertools

import numpy as np
from scipy import ndimage

from pcurves.cubical import GrayscaleImage
from pcurves.persistence import PersistenceDiagram


def random_image(rng: np.random.Generator, max_side: int = 24, levels: int = 256) -> GrayscaleImage:
    h, w = rng.integers(1, max_side + 1, size=2)
    # few levels give many ties, which exercises the tie-breaking path
    vals = rng.integers(0, levels, size=(h, w)) * (255 // max(levels - 1, 1))
    return GrayscaleImage(np.clip(vals, 0, 255))


def smooth_image(rng: np.random.Generator, side: int) -> GrayscaleImage:
    field = ndimage.gaussian_filter(rng.standard_normal((side, side)), 1.5)
    field = (field - field.min()) / max(np.ptp(field), 1e-12)
    return GrayscaleImage(np.rint(255 * field).astype(int))


def scipy_betti(mask: np.ndarray) -> tuple[int, int]:
    """(b0, b1) of a white pixel set by connected-component labelling.

    b0 counts 8-connected white components; b1 counts 4-connected black
    components that do not touch the image border.
    """
    mask = np.asarray(mask, dtype=bool)
    _, b0 = ndimage.label(mask, structure=np.ones((3, 3)))
    black, n_black = ndimage.label(~mask)
    border = set(np.unique(np.concatenate([black[0], black[-1], black[:, 0], black[:, -1]])))
    holes = sum(1 for k in range(1, n_black + 1) if k not in border)
    return int(b0), holes


def ring_image(inner: int = 255, ring: int = 0) -> GrayscaleImage:
    """3x3 frame of value ``ring`` around a single pixel of value ``inner``."""
    px = np.full((3, 3), ring)
    px[1, 1] = inner
    return GrayscaleImage(px)


def blobs_and_holes(rng: np.random.Generator | None = None) -> GrayscaleImage:
    """Eight separated 3x3 patches below 110 on a background above it; four are rings.

    The ring centres lie above 110, so at t = 110 the sublevel set has eight
    components and four holes.
    """
    rng = rng or np.random.default_rng(0)
    img = np.full((9, 17), 230)
    for k, (r, c) in enumerate(itertools.product((1, 5), (1, 5, 9, 13))):
        img[r:r + 3, c:c + 3] = rng.integers(40, 111, size=(3, 3))
        if k % 2:
            img[r + 1, c + 1] = rng.integers(150, 221)
    return GrayscaleImage(img)


def random_pairs(rng: np.random.Generator, n: int, low: float = 0.0, high: float = 100.0,
                 integer: bool = False) -> PersistenceDiagram:
    b = rng.uniform(low, high, n)
    d = rng.uniform(b, high + 1.0)
    if integer:
        b, d = np.floor(b), np.ceil(d)
    return PersistenceDiagram(b, d)


def brute_force_distances(C: PersistenceDiagram, D: PersistenceDiagram, p: float = 1.0):
    """(bottleneck, W_p) by enumerating every partial matching under the l-infinity norm."""
    cp = list(zip(C.births, C.deaths))
    dp = list(zip(D.births, D.deaths))

    def diag(x):
        return (x[1] - x[0]) / 2.0

    def dist(x, y):
        return max(abs(x[0] - y[0]), abs(x[1] - y[1]))

    best_inf, best_p = np.inf, np.inf
    n = len(cp)
    # each C point picks a distinct D index or the diagonal; unused D points go to the diagonal
    for choice in itertools.product(range(-1, len(dp)), repeat=n):
        used = [j for j in choice if j >= 0]
        if len(used) != len(set(used)):
            continue
        costs = [dist(cp[i], dp[j]) if j >= 0 else diag(cp[i]) for i, j in enumerate(choice)]
        costs += [diag(dp[j]) for j in range(len(dp)) if j not in used]
        if not costs:
            return 0.0, 0.0
        best_inf = min(best_inf, max(costs))
        best_p = min(best_p, sum(c ** p for c in costs) ** (1.0 / p))
    return best_inf, best_p
