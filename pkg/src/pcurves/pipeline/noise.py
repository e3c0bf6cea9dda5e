"""Integer Gaussian noise for robustness experiments."""

from __future__ import annotations

import numpy as np

from ..cubical import MAX_VALUE, GrayscaleImage


def noise_increments(shape, seed: int | None) -> np.ndarray:
    """Standard normal samples rounded to the nearest integer."""
    rng = np.random.default_rng(seed)
    return np.rint(rng.standard_normal(shape)).astype(np.int16)


def add_noise(image: GrayscaleImage, seed: int | None) -> GrayscaleImage:
    noisy = image.pixels.astype(np.int32) + noise_increments(image.pixels.shape, seed)
    return GrayscaleImage(np.clip(noisy, 0, MAX_VALUE))
