"""Reading and writing grayscale rasters (PGM always, PNG if Pillow is installed)."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .cubical import GrayscaleImage


class ImageFormatError(ValueError):
    pass


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise ImageFormatError("truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def parse_pgm(data: bytes) -> GrayscaleImage:
    """Decode P2 (ASCII) or P5 (binary) data with maxval <= 255."""
    tokens, pos = _header(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise ImageFormatError(f"not a PGM file (magic {magic!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError("malformed PGM header") from None
    if width < 1 or height < 1:
        raise ImageFormatError("PGM dimensions must be positive")
    if not 0 < maxval <= 255:
        raise ImageFormatError(f"maxval {maxval} unsupported (need 1..255)")
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        raster = data[pos + 1: pos + 1 + width * height]
        if len(raster) != width * height:
            raise ImageFormatError("truncated P5 raster")
        values = np.frombuffer(raster, dtype=np.uint8)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:]).split()
        if len(body) < width * height:
            raise ImageFormatError("truncated P2 raster")
        try:
            values = np.array([int(v) for v in body[: width * height]])
        except ValueError:
            raise ImageFormatError("non-integer P2 sample") from None
    if values.max(initial=0) > maxval:
        raise ImageFormatError("sample exceeds maxval")
    return GrayscaleImage(values.reshape(height, width).astype(np.int16))


def read_pgm(path: str | Path) -> GrayscaleImage:
    return parse_pgm(Path(path).read_bytes())


def write_pgm(image: GrayscaleImage, path: str | Path, binary: bool = True) -> None:
    h, w = image.height, image.width
    if binary:
        Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode() + image.pixels.astype(np.uint8).tobytes())
        return
    rows = "\n".join(" ".join(str(int(v)) for v in row) for row in image.pixels)
    Path(path).write_text(f"P2\n{w} {h}\n255\n{rows}\n")


def read_channels(path: str | Path, mode: str = "grayscale") -> list[GrayscaleImage]:
    """Load an image as one grayscale channel, or three with ``mode="rgb-split"``.

    PGM files hold a single channel and cannot be split.
    """
    path = Path(path)
    if path.suffix.lower() in (".pgm", ".pnm") or path.read_bytes()[:2] in (b"P2", b"P5"):
        if mode == "rgb-split":
            raise ImageFormatError(f"{path.name}: PGM has one channel, cannot rgb-split")
        return [read_pgm(path)]
    try:
        from PIL import Image
    except ImportError:  # pragma: no cover - depends on the environment
        raise ImageFormatError(f"{path.name}: only PGM is supported without Pillow") from None
    try:
        with Image.open(path) as im:
            if mode == "rgb-split":
                arr = np.asarray(im.convert("RGB"))
                return [GrayscaleImage(arr[:, :, c]) for c in range(3)]
            return [GrayscaleImage(np.asarray(im.convert("L")))]
    except OSError as exc:
        raise ImageFormatError(f"{path.name}: {exc}") from None
