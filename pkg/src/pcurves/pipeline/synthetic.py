"""Seeded synthetic texture families for desk-scale classification checks."""

from __future__ import annotations

import numpy as np

from ..cubical import GrayscaleImage

FAMILIES = ("blobs", "stripes")


#: default range of the gray-level span of a generated image; low spans make
#: unit-scale noise topologically significant
DEFAULT_CONTRAST = (30.0, 45.0)


def _to_image(rng: np.random.Generator, field: np.ndarray, contrast) -> GrayscaleImage:
    span = field.max() - field.min()
    scaled = (field - field.min()) / span if span > 0 else np.zeros_like(field)
    width = rng.uniform(*contrast)
    low = rng.uniform(120.0, 128.0) - width / 2
    return GrayscaleImage(np.clip(np.rint(low + width * scaled), 0, 255).astype(np.int16))


def blob_field(rng: np.random.Generator, size: int = 32, contrast=DEFAULT_CONTRAST) -> GrayscaleImage:
    """Dark round spots of jittered count and radius on a bright background."""
    yy, xx = np.mgrid[0:size, 0:size].astype(float)
    count = int(rng.integers(6, 11))
    field = np.zeros((size, size))
    for _ in range(count):
        cy, cx = rng.uniform(0, size, 2)
        radius = rng.uniform(1.8, 3.2) * size / 32
        field -= np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * radius ** 2))
    return _to_image(rng, field, contrast)


def stripe_field(rng: np.random.Generator, size: int = 32, contrast=DEFAULT_CONTRAST) -> GrayscaleImage:
    """Sinusoidal stripes with jittered orientation, period and phase."""
    yy, xx = np.mgrid[0:size, 0:size].astype(float)
    theta = rng.uniform(0, np.pi)
    period = rng.uniform(6.0, 9.0) * size / 32
    phase = rng.uniform(0, 2 * np.pi)
    field = np.sin(2 * np.pi * (xx * np.cos(theta) + yy * np.sin(theta)) / period + phase)
    return _to_image(rng, field, contrast)


def texture_corpus(n_per_class: int = 40, size: int = 32, seed: int = 0,
                   families=FAMILIES, contrast=DEFAULT_CONTRAST) -> tuple[list[GrayscaleImage], list[str]]:
    makers = {"blobs": blob_field, "stripes": stripe_field}
    rng = np.random.default_rng(seed)
    images, labels = [], []
    for fam in families:
        for _ in range(n_per_class):
            images.append(makers[fam](rng, size, contrast))
            labels.append(fam)
    return images, labels
