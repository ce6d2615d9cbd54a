import numpy as np
import pytest

from wsmaseg.errors import EmptyAfterClamp
from wsmaseg.geometry import (
    BBox,
    Ellipse,
    ellipse_ring,
    fill_ellipse,
    inner_boundary,
    inscribed_ellipse,
    new_mask,
)

from oracles import chessboard_inner_band, ellipse_membership


@pytest.mark.parametrize("box, expected", [
    ((0, 0, 8, 8), (4.0, 4.0, 4.0, 4.0)),
    ((2, 3, 6, 4), (5.0, 5.0, 3.0, 2.0)),
    ((0, 0, 1, 1), (0.5, 0.5, 0.5, 0.5)),
])
def test_inscribed_ellipse(box, expected):
    e = inscribed_ellipse(BBox(*box))
    assert (e.cx, e.cy, e.a, e.b) == expected


def test_bbox_rejects_degenerate_sides():
    with pytest.raises(ValueError):
        BBox(0, 0, 0, 5)


def test_bbox_clamp():
    assert BBox(-3, -2, 10, 10).clamp(8, 8) == BBox(0, 0, 7, 8)
    with pytest.raises(EmptyAfterClamp):
        BBox(20, 0, 5, 5).clamp(8, 8)


def test_fill_single_pixel():
    canvas = new_mask(1, 1)
    fill_ellipse(Ellipse(0.5, 0.5, 0.5, 0.5), canvas)
    assert canvas.tolist() == [[1]]


def test_fill_matches_membership_oracle_8x8():
    canvas = new_mask(8, 8)
    fill_ellipse(Ellipse(4, 4, 4, 4), canvas)
    assert np.array_equal(canvas, ellipse_membership(4, 4, 4, 4, 8, 8))


def test_fill_outside_canvas_is_noop():
    canvas = new_mask(6, 6)
    fill_ellipse(Ellipse(100.0, 100.0, 3.0, 3.0), canvas)
    assert canvas.sum() == 0


def test_fill_union_semantics():
    canvas = new_mask(8, 8)
    canvas[0, 7] = 1
    fill_ellipse(Ellipse(2, 2, 1.5, 1.5), canvas)
    assert canvas[0, 7] == 1


def test_fill_matches_oracle_random():
    rng = np.random.default_rng(7)
    for _ in range(60):
        w = int(rng.integers(1, 64))
        h = int(rng.integers(1, 64))
        cx = rng.uniform(-5, w + 5)
        cy = rng.uniform(-5, h + 5)
        a = rng.uniform(0.2, w)
        b = rng.uniform(0.2, h)
        canvas = new_mask(w, h)
        fill_ellipse(Ellipse(cx, cy, a, b), canvas)
        assert np.array_equal(canvas, ellipse_membership(cx, cy, a, b, w, h))


def test_fill_monotone_in_axes():
    rng = np.random.default_rng(8)
    for _ in range(30):
        cx, cy = rng.uniform(0, 16, size=2)
        a, b = rng.uniform(0.5, 8, size=2)
        small = new_mask(16, 16)
        big = new_mask(16, 16)
        fill_ellipse(Ellipse(cx, cy, a, b), small)
        fill_ellipse(Ellipse(cx, cy, a + rng.uniform(0, 4), b + rng.uniform(0, 4)), big)
        assert np.all(big >= small)


def test_ring_matches_set_difference_oracle():
    full = ellipse_membership(4, 4, 4, 4, 9, 9)
    inner = ellipse_membership(4, 4, 3, 3, 9, 9)
    canvas = new_mask(9, 9)
    ellipse_ring(Ellipse(4, 4, 4, 4), 1, canvas)
    assert np.array_equal(canvas, full & ~inner)


def test_ring_wide_width_equals_fill():
    e = Ellipse(5, 5, 3, 4)
    ring = ellipse_ring(e, 4, new_mask(10, 10))
    filled = fill_ellipse(e, new_mask(10, 10))
    assert np.array_equal(ring, filled)


def test_ring_degenerate_single_pixel():
    canvas = ellipse_ring(Ellipse(0.5, 0.5, 0.5, 0.5), 1, new_mask(2, 2))
    assert canvas.sum() == 1 and canvas[0, 0] == 1


def test_ring_subset_of_fill():
    rng = np.random.default_rng(9)
    for _ in range(30):
        e = Ellipse(rng.uniform(0, 20), rng.uniform(0, 20),
                    rng.uniform(0.5, 10), rng.uniform(0.5, 10))
        w = int(rng.integers(2, 5))
        ring = ellipse_ring(e, w, new_mask(20, 20))
        filled = fill_ellipse(e, new_mask(20, 20))
        assert np.all(filled >= ring)


def test_inner_boundary_square_border():
    region = np.zeros((7, 7), dtype=np.uint8)
    region[1:6, 1:6] = 1
    band = inner_boundary(region, 1)
    assert band.sum() == 16
    assert np.array_equal(band, chessboard_inner_band(region, 1))


def test_inner_boundary_empty_mask():
    region = np.zeros((5, 5), dtype=np.uint8)
    assert inner_boundary(region, 1).sum() == 0


def test_inner_boundary_erosion_empties_region():
    region = np.zeros((5, 5), dtype=np.uint8)
    region[1:4, 1:4] = 1
    assert np.array_equal(inner_boundary(region, 2), region)


def test_inner_boundary_matches_distance_oracle():
    rng = np.random.default_rng(10)
    for _ in range(25):
        region = (rng.random((12, 12)) < 0.6).astype(np.uint8)
        for width in (1, 2, 3):
            got = inner_boundary(region, width)
            assert np.array_equal(got, chessboard_inner_band(region, width))


def test_inner_boundary_nested_and_subset():
    rng = np.random.default_rng(11)
    for _ in range(20):
        region = (rng.random((16, 16)) < 0.7).astype(np.uint8)
        b1 = inner_boundary(region, 1)
        b2 = inner_boundary(region, 2)
        assert np.all(region >= b1)
        assert np.all(b2 >= b1)
