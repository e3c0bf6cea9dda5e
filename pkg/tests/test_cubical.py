import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import random_image, ring_image, scipy_betti
from pcurves.cubical import (BinaryImage, Cell, GrayscaleImage, betti_oracle, boundary_chain,
                             build_filtered_complex, complement, count_components,
                             elementary_boundary, euler_characteristic, pad, threshold)
from pcurves.imageio import ImageFormatError, parse_pgm, read_channels, read_pgm, write_pgm

pixels = arrays(np.int16, st.tuples(st.integers(1, 7), st.integers(1, 7)),
                elements=st.integers(0, 255))
masks = arrays(bool, st.tuples(st.integers(1, 9), st.integers(1, 9)))


# -- images -------------------------------------------------------------------

def test_image_validation():
    with pytest.raises(ValueError):
        GrayscaleImage(np.array([[256]]))
    with pytest.raises(ValueError):
        GrayscaleImage(np.array([[-1]]))
    with pytest.raises(ValueError):
        GrayscaleImage(np.zeros((0, 3), dtype=int))
    with pytest.raises(ValueError):
        GrayscaleImage.from_values(2, 2, [1, 2, 3])


def test_from_values_is_row_major():
    img = GrayscaleImage.from_values(3, 2, [0, 1, 2, 3, 4, 5])
    assert (img.width, img.height) == (3, 2)
    assert img[1, 0] == 3
    assert img.values.tolist() == [0, 1, 2, 3, 4, 5]


def test_images_are_immutable():
    img = GrayscaleImage(np.zeros((2, 2), dtype=int))
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 9


def test_threshold_examples():
    assert threshold(GrayscaleImage(np.zeros((3, 4), int)), 0).mask.all()
    rng = np.random.default_rng(1)
    assert threshold(GrayscaleImage(rng.integers(0, 256, (5, 5))), 255).mask.all()
    img = GrayscaleImage(np.array([[0, 100], [200, 255]]))
    assert threshold(img, 100).mask.tolist() == [[True, True], [False, False]]
    with pytest.raises(ValueError):
        threshold(img, 256)


@given(pixels, st.integers(0, 255), st.integers(0, 255))
def test_threshold_monotone(px, t1, t2):
    img = GrayscaleImage(px)
    lo, hi = sorted((t1, t2))
    a, b = threshold(img, lo).mask, threshold(img, hi).mask
    assert np.array_equal(a, img.pixels <= lo)
    assert not np.any(a & ~b)


def test_complement_examples():
    assert complement(GrayscaleImage(np.full((2, 3), 255))) == GrayscaleImage(np.zeros((2, 3), int))
    img = GrayscaleImage(np.array([[0, 100], [200, 255]]))
    assert complement(img).pixels.tolist() == [[255, 155], [55, 0]]


@given(pixels)
def test_complement_involution(px):
    img = GrayscaleImage(px)
    assert complement(complement(img)) == img


def test_pad():
    img = pad(GrayscaleImage(np.full((2, 2), 9)), value=0)
    assert img.pixels.shape == (4, 4)
    assert img.pixels[0].tolist() == [0, 0, 0, 0] and img.pixels[1, 1] == 9


# -- complex construction ------------------------------------------------------

@pytest.mark.parametrize("shape", [(1, 1), (2, 1), (1, 5), (4, 3), (7, 7)])
def test_cell_counts(shape):
    h, w = shape
    cx = build_filtered_complex(GrayscaleImage(np.zeros(shape, int)))
    assert cx.count(2) == w * h
    assert cx.count(1) == w * (h + 1) + h * (w + 1)
    assert cx.count(0) == (w + 1) * (h + 1)


def test_single_pixel_closure():
    cx = build_filtered_complex(GrayscaleImage(np.array([[77]])))
    assert (cx.count(2), cx.count(1), cx.count(0)) == (1, 4, 4)
    assert {c.filtration_value for c in cx.cells} == {77}


def test_shared_edge_takes_min():
    cx = build_filtered_complex(GrayscaleImage(np.array([[3, 7]])))
    shared = Cell(3, 1, (0, 1), "v")
    assert cx.cells[cx.index_of(shared)] == shared


def test_center_vertex_takes_min_of_four():
    cx = build_filtered_complex(GrayscaleImage(np.array([[30, 20], [40, 10]])))
    center = [c for c in cx.cells if c.dimension == 0 and c.anchor == (1, 1)]
    assert len(center) == 1 and center[0].filtration_value == 10


def _cofaces_min(px, cell):
    """Minimum pixel value over the pixels whose closed square contains ``cell``."""
    (r0, r1), (c0, c1) = cell.intervals
    h, w = px.shape
    vals = [px[i, j] for i in range(r1 - 1, r0 + 1) for j in range(c1 - 1, c0 + 1)
            if 0 <= i < h and 0 <= j < w]
    return min(vals)


def test_lower_cells_carry_min_of_cofaces():
    rng = np.random.default_rng(3)
    for _ in range(20):
        img = random_image(rng, max_side=6)
        cx = build_filtered_complex(img)
        for cell in cx.cells:
            assert cell.filtration_value == _cofaces_min(img.pixels, cell)


def test_filtration_order_is_valid():
    rng = np.random.default_rng(4)
    for _ in range(30):
        cx = build_filtered_complex(random_image(rng, max_side=10, levels=4))
        keys = [(c.filtration_value, c.dimension) for c in cx.cells]
        assert keys == sorted(keys)
        for k, faces in enumerate(cx.boundary):
            assert all(f < k for f in faces)
            assert all(cx.cells[f].filtration_value <= cx.cells[k].filtration_value for f in faces)


def test_sublevel_complex_is_closure_of_threshold():
    rng = np.random.default_rng(5)
    img = random_image(rng, max_side=8)
    cx = build_filtered_complex(img)
    for t in (0, 50, 128, 200, 255):
        white = threshold(img, t).mask
        expected = set()
        for i, j in zip(*np.nonzero(white)):
            square = Cell(0, 2, (int(i), int(j)))
            expected |= {(c.dimension, c.anchor, c.orientation) for c in _closure(square)}
        got = {(c.dimension, c.anchor, c.orientation) for c in cx.sublevel(t)}
        assert got == expected


def _closure(square):
    i, j = square.anchor
    out = [square]
    out += [Cell(0, 1, (i, j), "h"), Cell(0, 1, (i + 1, j), "h"),
            Cell(0, 1, (i, j), "v"), Cell(0, 1, (i, j + 1), "v")]
    out += [Cell(0, 0, (i + a, j + b)) for a in (0, 1) for b in (0, 1)]
    return out


def test_sublevel_monotone():
    rng = np.random.default_rng(6)
    cx = build_filtered_complex(random_image(rng, max_side=9))
    prev = set()
    for t in range(0, 256, 15):
        cur = set(cx.sublevel(t))
        assert prev <= cur
        prev = cur


# -- boundaries ----------------------------------------------------------------

def test_boundary_examples():
    cx = build_filtered_complex(GrayscaleImage(np.array([[4]])))
    vertex = next(c for c in cx.cells if c.dimension == 0)
    assert boundary_chain(vertex, cx) == {}
    edge = Cell(4, 1, (0, 0), "v")   # [0,1] x [0]
    assert set(boundary_chain(edge, cx)) == {Cell(4, 0, (0, 0)), Cell(4, 0, (1, 0))}
    square = next(c for c in cx.cells if c.dimension == 2)
    assert len(boundary_chain(square, cx)) == 4
    assert all(c.dimension == 1 for c in boundary_chain(square, cx))


def test_elementary_boundary_of_interval():
    assert elementary_boundary([(0, 1), (0, 0)]) == {((1, 1), (0, 0)): 1, ((0, 0), (0, 0)): -1}
    assert elementary_boundary([(3, 3)]) == {}
    with pytest.raises(ValueError):
        elementary_boundary([(0, 2)])


@pytest.mark.parametrize("cube", [
    [(0, 1), (0, 1)],
    [(0, 1), (0, 1), (0, 1)],
    [(2, 3), (5, 5), (1, 2), (0, 1)],
])
def test_elementary_boundary_squares_to_zero(cube):
    total = {}
    for face, coef in elementary_boundary(cube).items():
        for f2, c2 in elementary_boundary(list(face)).items():
            total[f2] = total.get(f2, 0) + coef * c2
    assert all(v == 0 for v in total.values())


def test_boundary_of_boundary_vanishes_on_random_images():
    rng = np.random.default_rng(7)
    for _ in range(100):
        cx = build_filtered_complex(random_image(rng, max_side=6))
        for k, cell in enumerate(cx.cells):
            if cell.dimension:
                assert cx.boundary_of_chain(cx.boundary_chain(k)) == {}


def test_complex_boundary_matches_elementary_boundary():
    cx = build_filtered_complex(random_image(np.random.default_rng(8), max_side=5))
    for cell in cx.cells:
        mod2 = {f for f, c in elementary_boundary(cell.intervals).items() if c % 2}
        assert {f.intervals for f in cx.boundary_chain(cell)} == mod2


# -- Betti oracle ----------------------------------------------------------------

def test_betti_oracle_examples():
    assert betti_oracle(BinaryImage(np.zeros((4, 4), bool))) == (0, 0)
    frame = threshold(ring_image(), 0)
    assert betti_oracle(frame) == (1, 1)
    two = np.zeros((3, 7), bool)
    two[:, :3] = frame.mask
    two[:, 4:] = frame.mask
    assert betti_oracle(BinaryImage(two)) == (2, 2)


def test_diagonal_pixels_are_connected():
    assert betti_oracle(BinaryImage(np.eye(4, dtype=bool))) == (1, 0)
    # four pixels around a black center touching only at corners enclose nothing
    diamond = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], bool)
    assert betti_oracle(BinaryImage(diamond)) == (1, 1)


@settings(max_examples=300)
@given(masks)
def test_betti_oracle_matches_labelling(mask):
    assert betti_oracle(BinaryImage(mask)) == scipy_betti(mask)


@given(masks)
def test_euler_consistency(mask):
    b0, b1 = betti_oracle(BinaryImage(mask))
    assert euler_characteristic(BinaryImage(mask)) == b0 - b1


def test_euler_characteristic_counts_cells():
    rng = np.random.default_rng(9)
    for _ in range(20):
        img = random_image(rng, max_side=7)
        cx = build_filtered_complex(img)
        for t in (30, 128, 250):
            cells = cx.sublevel(t)
            chi = sum((-1) ** c.dimension for c in cells)
            assert chi == euler_characteristic(threshold(img, t))


def test_count_components_large_blank():
    assert count_components(BinaryImage(np.ones((40, 40), bool))) == 1


# -- PGM -----------------------------------------------------------------------

def test_pgm_roundtrip(tmp_path):
    img = random_image(np.random.default_rng(10), max_side=12)
    for binary in (True, False):
        path = tmp_path / f"img_{binary}.pgm"
        write_pgm(img, path, binary=binary)
        assert read_pgm(path) == img
        assert read_channels(path) == [img]


def test_pgm_header_comments_and_maxval():
    data = b"P2\n# a comment\n2 1\n# another\n15\n3 15\n"
    assert parse_pgm(data).pixels.tolist() == [[3, 15]]
    with pytest.raises(ImageFormatError):
        parse_pgm(b"P2\n1 1\n65535\n300\n")
    with pytest.raises(ImageFormatError):
        parse_pgm(b"P5\n2 2\n255\n\x00")
    with pytest.raises(ImageFormatError):
        parse_pgm(b"P6\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(ImageFormatError):
        parse_pgm(b"P2\n2 1\n10\n3 11\n")


def test_pgm_cannot_be_rgb_split(tmp_path):
    path = tmp_path / "a.pgm"
    write_pgm(GrayscaleImage(np.zeros((2, 2), int)), path)
    with pytest.raises(ImageFormatError):
        read_channels(path, "rgb-split")


def test_png_channels(tmp_path):
    Image = pytest.importorskip("PIL.Image")
    rgb = np.random.default_rng(11).integers(0, 256, (5, 6, 3)).astype(np.uint8)
    path = tmp_path / "c.png"
    Image.fromarray(rgb).save(path)
    chans = read_channels(path, "rgb-split")
    assert [c.pixels.tolist() for c in chans] == [rgb[:, :, k].tolist() for k in range(3)]
    (gray,) = read_channels(path)
    assert gray.pixels.shape == (5, 6)
