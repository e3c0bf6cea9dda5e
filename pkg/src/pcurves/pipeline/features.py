"""Feature vectors built from persistence curves of an image and its complement.

Per channel, every curve contributes the blocks ``D0(I), D1(I), D0(I^C),
D1(I^C)`` (ECC contributes ``I, I^C``), followed by the persistence
statistics of the same diagrams when requested.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..cubical import GrayscaleImage, build_filtered_complex, complement, pad
from ..curves import CURVES, DEFAULT_GRID, ecc, persistence_statistics
from ..persistence import DEFAULT_CAP, PersistenceDiagram, cap_infinite, compute_persistence

CURVE_NAMES = tuple(CURVES) + ("ecc",)
CHANNEL_MODES = ("grayscale", "rgb-split")


class FeatureConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureConfig:
    curves: tuple[str, ...] = ("betti",)
    use_complement: bool = True
    include_statistics: bool = False
    grid: tuple[float, ...] = tuple(DEFAULT_GRID.tolist())
    channels: str = "grayscale"
    cap: float = DEFAULT_CAP
    pad: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "grid", tuple(float(t) for t in self.grid))
        unknown = [c for c in self.curves if c not in CURVE_NAMES]
        if unknown:
            raise FeatureConfigError(f"unknown curve name(s) {unknown}; choose from {CURVE_NAMES}")
        if not self.grid or np.any(np.diff(self.grid) <= 0):
            raise FeatureConfigError("grid must be non-empty and strictly increasing")
        if self.channels not in CHANNEL_MODES:
            raise FeatureConfigError(f"channels must be one of {CHANNEL_MODES}")

    @classmethod
    def from_dict(cls, raw: dict) -> "FeatureConfig":
        raw = dict(raw)
        grid = raw.pop("grid", None)
        if isinstance(grid, dict):
            grid = np.linspace(grid["start"], grid["stop"], int(grid["num"])).tolist()
        if grid is not None:
            raw["grid"] = grid
        allowed = set(cls.__dataclass_fields__)
        extra = set(raw) - allowed
        if extra:
            raise FeatureConfigError(f"unknown config keys {sorted(extra)}")
        return cls(**raw)

    @classmethod
    def from_json(cls, path: str | Path) -> "FeatureConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["curves"] = list(self.curves)
        out["grid"] = list(self.grid)
        return out


@dataclass(frozen=True)
class Block:
    start: int
    stop: int
    channel: int
    source: str          # "image" or "complement"
    dimension: int | None  # None for ECC blocks
    name: str            # curve name, or "statistics"

    def __len__(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    layout: tuple[Block, ...]
    diagrams: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        covered = 0
        for blk in self.layout:
            if blk.start != covered:
                raise ValueError("layout blocks do not tile the vector")
            covered = blk.stop
        if covered != self.values.size:
            raise ValueError("layout length does not match the vector")

    def block(self, blk: Block) -> np.ndarray:
        return self.values[blk.start:blk.stop]


def _sources(config: FeatureConfig) -> tuple[str, ...]:
    return ("image", "complement") if config.use_complement else ("image",)


def plan_layout(config: FeatureConfig, n_channels: int) -> tuple[Block, ...]:
    """Block order for a config; depends only on the config and channel count."""
    grid_len = len(config.grid)
    blocks = []
    pos = 0

    def add(channel, source, dim, name, size):
        nonlocal pos
        blocks.append(Block(pos, pos + size, channel, source, dim, name))
        pos += size

    for ch in range(n_channels):
        for name in config.curves:
            for source in _sources(config):
                if name == "ecc":
                    add(ch, source, None, name, grid_len)
                    continue
                for dim in (0, 1):
                    add(ch, source, dim, name, grid_len)
        if config.include_statistics:
            for source in _sources(config):
                for dim in (0, 1):
                    add(ch, source, dim, "statistics", 18)
    return tuple(blocks)


def _as_channels(image, config: FeatureConfig) -> list[GrayscaleImage]:
    if isinstance(image, GrayscaleImage):
        channels = [image]
    elif isinstance(image, (list, tuple)):
        channels = [c if isinstance(c, GrayscaleImage) else GrayscaleImage(c) for c in image]
    else:
        arr = np.asarray(image)
        if arr.ndim == 2:
            channels = [GrayscaleImage(arr)]
        elif arr.ndim == 3:
            channels = [GrayscaleImage(arr[:, :, c]) for c in range(arr.shape[2])]
        else:
            raise FeatureConfigError(f"cannot interpret array of shape {arr.shape} as an image")
    if config.channels == "grayscale" and len(channels) != 1:
        raise FeatureConfigError(f"grayscale config got {len(channels)} channels")
    if config.channels == "rgb-split" and len(channels) != 3:
        raise FeatureConfigError(f"rgb-split config got {len(channels)} channels")
    return channels


def channel_diagrams(image: GrayscaleImage, config: FeatureConfig) -> dict:
    """Capped D0/D1 of the image (and complement), keyed by (source, dim)."""
    out = {}
    for source in _sources(config):
        img = image if source == "image" else complement(image)
        if config.pad:
            img = pad(img)
        d0, d1 = compute_persistence(build_filtered_complex(img))
        out[(source, 0)] = cap_infinite(d0, config.cap)
        out[(source, 1)] = cap_infinite(d1, config.cap)
    return out


def compute_block(blk: Block, diagrams: dict, config: FeatureConfig) -> np.ndarray:
    """Recompute one block from the diagrams of ``blk.channel``."""
    grid = np.asarray(config.grid)
    if blk.name == "statistics":
        return persistence_statistics(diagrams[(blk.source, blk.dimension)])
    if blk.name == "ecc":
        return ecc([diagrams[(blk.source, 0)], diagrams[(blk.source, 1)]], grid).values
    return CURVES[blk.name](diagrams[(blk.source, blk.dimension)], grid).values


def extract_features(image, config: FeatureConfig) -> FeatureVector:
    channels = _as_channels(image, config)
    return assemble_features([channel_diagrams(ch, config) for ch in channels], config)


def assemble_features(per_channel: Sequence[dict], config: FeatureConfig) -> FeatureVector:
    """Feature vector from already computed diagrams (one dict per channel)."""
    layout = plan_layout(config, len(per_channel))
    values = np.empty(layout[-1].stop if layout else 0)
    for blk in layout:
        values[blk.start:blk.stop] = compute_block(blk, per_channel[blk.channel], config)
    diagrams = {(c, s, k): dgm for c, dgms in enumerate(per_channel) for (s, k), dgm in dgms.items()}
    return FeatureVector(values, layout, diagrams)


def _extract_values(args) -> np.ndarray:
    image, config = args
    return extract_features(image, config).values


def extract_many(images: Sequence, config: FeatureConfig, workers: int = 1) -> np.ndarray:
    """Feature matrix, one row per image, in input order regardless of ``workers``."""
    jobs = [(img, config) for img in images]
    if workers <= 1 or len(jobs) < 2:
        rows = [_extract_values(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_extract_values, jobs))
    return np.vstack(rows) if rows else np.empty((0, 0))


def layout_to_json(layout: Sequence[Block], config: FeatureConfig) -> str:
    return json.dumps({"config": config.to_dict(), "blocks": [asdict(b) for b in layout]}, indent=2)


def layout_from_json(text: str) -> tuple[FeatureConfig, tuple[Block, ...]]:
    raw = json.loads(text)
    return FeatureConfig.from_dict(raw["config"]), tuple(Block(**b) for b in raw["blocks"])
