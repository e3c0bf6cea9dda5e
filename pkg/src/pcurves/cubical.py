"""Images as filtered cubical complexes.

Pixels are closed unit squares ``[i, i+1] x [j, j+1]``, so two white pixels
that only touch at a corner belong to the same component. White sets are
therefore 8-connected and their holes 4-connected. Images are used as-is:
no white frame is added unless :func:`pad` is called explicitly.

Lower dimensional cells take the minimum value over the pixels that contain
them, which makes the sublevel complex at ``t`` equal to the cubical closure
of the thresholded image.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_VALUE = 255

# Khalimsky-style doubled coordinates: a vertex (i, j) lives at (2i, 2j),
# a horizontal edge at (2i, 2j+1), a vertical edge at (2i+1, 2j) and the
# pixel (i, j) at (2i+1, 2j+1).
_SENTINEL = MAX_VALUE + 1


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GrayscaleImage:
    """An integer raster with values in 0..255, indexed ``pixels[row, col]``."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2D raster, got shape {arr.shape}")
        if arr.dtype.kind == "f":
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValueError("pixel values must be integers")
        elif arr.dtype.kind not in "iub":
            raise TypeError(f"unsupported pixel dtype {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > MAX_VALUE):
            raise ValueError("pixel values must lie in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(arr.astype(np.int16)))

    @classmethod
    def from_values(cls, width: int, height: int, values: Sequence[int]) -> "GrayscaleImage":
        """Build from a row-major value list."""
        values = np.asarray(values)
        if values.size != width * height:
            raise ValueError(f"{values.size} values for a {width}x{height} image")
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def values(self) -> np.ndarray:
        """Row-major flat view of the pixel values."""
        return self.pixels.ravel()

    def __getitem__(self, idx):
        return self.pixels[idx]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayscaleImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self) -> int:
        return hash((self.pixels.shape, self.pixels.tobytes()))


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """A boolean raster; ``True`` marks a white (present) pixel."""

    mask: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.mask)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2D mask, got shape {arr.shape}")
        object.__setattr__(self, "mask", _frozen(arr.astype(bool)))

    @property
    def width(self) -> int:
        return int(self.mask.shape[1])

    @property
    def height(self) -> int:
        return int(self.mask.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.mask, other.mask)

    def __hash__(self) -> int:
        return hash((self.mask.shape, self.mask.tobytes()))


@dataclass(frozen=True, order=True)
class Cell:
    """An elementary cube of the image complex.

    ``anchor`` is the lattice corner with the smallest coordinates. Edges
    carry an ``orientation``: ``"h"`` runs along a row, ``"v"`` down a column.
    """

    filtration_value: int
    dimension: int
    anchor: tuple[int, int]
    orientation: str | None = None

    @property
    def intervals(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """The cube as a product of elementary intervals (row, col)."""
        i, j = self.anchor
        if self.dimension == 0:
            return (i, i), (j, j)
        if self.dimension == 2:
            return (i, i + 1), (j, j + 1)
        if self.orientation == "h":
            return (i, i), (j, j + 1)
        return (i, i + 1), (j, j)


def _cell_at(r: int, c: int, value: int) -> Cell:
    dim = (r & 1) + (c & 1)
    orientation = None
    if dim == 1:
        orientation = "h" if r % 2 == 0 else "v"
    return Cell(int(value), dim, (r // 2, c // 2), orientation)


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """All cubes of an image with filtration values, in filtration order.

    ``boundary[k]`` lists the positions (in ``cells``) of the facets of
    ``cells[k]``; every facet position is smaller than ``k``.
    """

    cells: tuple[Cell, ...]
    boundary: tuple[tuple[int, ...], ...]
    shape: tuple[int, int]
    values: np.ndarray = field(repr=False)
    dims: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.cells)

    def count(self, dimension: int) -> int:
        return int(np.count_nonzero(self.dims == dimension))

    def index_of(self, cell: Cell) -> int:
        lookup = self.__dict__.get("_lookup")
        if lookup is None:
            lookup = {c: k for k, c in enumerate(self.cells)}
            object.__setattr__(self, "_lookup", lookup)
        try:
            return lookup[cell]
        except KeyError:
            raise KeyError(f"{cell} is not a cell of this complex") from None

    def boundary_chain(self, cell: Cell | int) -> Counter:
        """Mod-2 boundary of a cell, as a Counter of cells with coefficient 1."""
        k = cell if isinstance(cell, (int, np.integer)) else self.index_of(cell)
        return Counter({self.cells[f]: 1 for f in self.boundary[k]})

    def boundary_of_chain(self, chain: Iterable[Cell] | Counter) -> Counter:
        """Mod-2 boundary of a chain; cells with even coefficient cancel."""
        counts: Counter = Counter()
        items = chain.items() if isinstance(chain, Counter) else ((c, 1) for c in chain)
        for c, mult in items:
            if mult % 2:
                for f in self.boundary[self.index_of(c)]:
                    counts[self.cells[f]] += 1
        return Counter({c: 1 for c, m in counts.items() if m % 2})

    def sublevel(self, t: float) -> list[Cell]:
        return [c for c in self.cells if c.filtration_value <= t]

    def reordered(self, order: Sequence[int]) -> "FilteredComplex":
        """The same complex listed in another order; raises if the order is not a filtration."""
        order = list(order)
        if sorted(order) != list(range(len(self.cells))):
            raise ValueError("order must be a permutation of the cell positions")
        new_pos = np.empty(len(order), dtype=np.int64)
        new_pos[order] = np.arange(len(order))
        cells = tuple(self.cells[k] for k in order)
        boundary = tuple(tuple(sorted(int(new_pos[f]) for f in self.boundary[k])) for k in order)
        vals = np.array([c.filtration_value for c in cells])
        if np.any(np.diff(vals) < 0):
            raise ValueError("order is not monotone in filtration value")
        for k, faces in enumerate(boundary):
            if faces and faces[-1] >= k:
                raise ValueError("a facet appears after its coface")
        return FilteredComplex(cells, boundary, self.shape, _frozen(vals), _frozen(self.dims[order]))


def threshold(image: GrayscaleImage, t: int) -> BinaryImage:
    """Sublevel set ``{(i, j) : I(i, j) <= t}``."""
    if not 0 <= t <= MAX_VALUE:
        raise ValueError(f"threshold {t} outside [0, 255]")
    return BinaryImage(image.pixels <= t)


def complement(image: GrayscaleImage) -> GrayscaleImage:
    return GrayscaleImage(MAX_VALUE - image.pixels)


def pad(image: GrayscaleImage, value: int = 0, width: int = 1) -> GrayscaleImage:
    """Surround the image with a frame of constant pixels (0 = always white)."""
    return GrayscaleImage(np.pad(image.pixels, width, constant_values=value))


def khalimsky_values(pixels: np.ndarray) -> np.ndarray:
    """Filtration value of every cube on the doubled-coordinate grid."""
    h, w = pixels.shape
    grid = np.full((2 * h + 3, 2 * w + 3), _SENTINEL, dtype=np.int16)
    # one sentinel ring so every cell sees its (possibly absent) cofaces
    grid[2:-1:2, 2:-1:2] = pixels
    pix = grid
    # edges: min of the two pixels sharing them
    horiz = np.minimum(pix[0:-2:2, 2:-1:2], pix[2::2, 2:-1:2])   # rows 2i, cols 2j+1
    vert = np.minimum(pix[2:-1:2, 0:-2:2], pix[2:-1:2, 2::2])    # rows 2i+1, cols 2j
    quad = np.minimum(
        np.minimum(pix[0:-2:2, 0:-2:2], pix[0:-2:2, 2::2]),
        np.minimum(pix[2::2, 0:-2:2], pix[2::2, 2::2]),
    )
    out = np.empty((2 * h + 1, 2 * w + 1), dtype=np.int16)
    out[1::2, 1::2] = pixels
    out[0::2, 1::2] = horiz
    out[1::2, 0::2] = vert
    out[0::2, 0::2] = quad
    return out


def build_filtered_complex(image: GrayscaleImage) -> FilteredComplex:
    """The full cubical complex of the image, sorted by (value, dimension, anchor)."""
    kv = khalimsky_values(image.pixels)
    H, W = kv.shape
    rr, cc = np.meshgrid(np.arange(H), np.arange(W), indexing="ij")
    rr, cc, vals = rr.ravel(), cc.ravel(), kv.ravel()
    dims = (rr & 1) + (cc & 1)
    anchor_r, anchor_c = rr // 2, cc // 2
    orient = rr & 1  # 0 = horizontal, 1 = vertical, for edges
    order = np.lexsort((orient, anchor_c, anchor_r, dims, vals))

    pos = np.empty(H * W, dtype=np.int64)
    pos[order] = np.arange(order.size)
    pos = pos.reshape(H, W)

    cells = []
    boundary = []
    for flat in order.tolist():
        r, c = divmod(flat, W)
        cells.append(_cell_at(r, c, kv[r, c]))
        faces = []
        if r & 1:
            faces += [pos[r - 1, c], pos[r + 1, c]]
        if c & 1:
            faces += [pos[r, c - 1], pos[r, c + 1]]
        boundary.append(tuple(sorted(int(f) for f in faces)))
    return FilteredComplex(
        tuple(cells),
        tuple(boundary),
        (image.height, image.width),
        _frozen(vals[order].astype(np.int64)),
        _frozen(dims[order].astype(np.int8)),
    )


def elementary_boundary(intervals: Sequence[tuple[int, int]]) -> Counter:
    """Signed boundary of an elementary cube given as ``(lo, hi)`` intervals.

    Works in any embedding dimension; ``hi - lo`` must be 0 or 1. Returns a
    Counter over faces (tuples of intervals) with integer coefficients.
    """
    out: Counter = Counter()
    sign = 1
    for k, (lo, hi) in enumerate(intervals):
        if hi - lo not in (0, 1):
            raise ValueError(f"{(lo, hi)} is not an elementary interval")
        if hi == lo:
            continue
        head = tuple(intervals[:k])
        tail = tuple(intervals[k + 1:])
        out[head + ((hi, hi),) + tail] += sign
        out[head + ((lo, lo),) + tail] -= sign
        sign = -sign
    return Counter({q: v for q, v in out.items() if v})


def boundary_chain(cell: Cell, complex: FilteredComplex) -> Counter:
    return complex.boundary_chain(cell)


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


_NEIGHBOUR_OFFSETS = ((0, 1), (1, 0), (1, 1), (1, -1))


def euler_characteristic(binary: BinaryImage) -> int:
    """V - E + F of the closure of the white pixels."""
    m = np.pad(binary.mask, 1)
    faces = int(m.sum())
    # vertex (i, j) touches pixels (i-1..i, j-1..j) in unpadded coordinates
    verts = m[:-1, :-1] | m[:-1, 1:] | m[1:, :-1] | m[1:, 1:]
    h_edges = m[:-1, 1:-1] | m[1:, 1:-1]
    v_edges = m[1:-1, :-1] | m[1:-1, 1:]
    return int(verts.sum()) - int(h_edges.sum()) - int(v_edges.sum()) + faces


def count_components(binary: BinaryImage) -> int:
    """Number of 8-connected white components, by union-find."""
    mask = binary.mask
    h, w = mask.shape
    white = np.flatnonzero(mask.ravel())
    if white.size == 0:
        return 0
    uf = UnionFind(h * w)
    merges = 0
    for dr, dc in _NEIGHBOUR_OFFSETS:
        r0, r1 = 0, h - dr
        c0, c1 = max(0, -dc), w - max(0, dc)
        a = mask[r0:r1, c0:c1]
        b = mask[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
        rows, cols = np.nonzero(a & b)
        src = ((rows + r0) * w + cols + c0).tolist()
        dst = ((rows + r0 + dr) * w + cols + c0 + dc).tolist()
        for p, q in zip(src, dst):
            if uf.union(p, q):
                merges += 1
    return int(white.size) - merges


def betti_oracle(binary: BinaryImage) -> tuple[int, int]:
    """(beta0, beta1) of the white cubical set, without any matrix reduction."""
    b0 = count_components(binary)
    if b0 == 0:
        return 0, 0
    return b0, b0 - euler_characteristic(binary)
