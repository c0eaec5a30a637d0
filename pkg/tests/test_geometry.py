import math

import pytest
from hypothesis import given, strategies as st

from chargrid_ocr.geometry import (
    Rect,
    bounding_rect,
    intersection_area,
    iou,
    overlap_fraction_of_smaller,
    pixel_span,
)

coord = st.floats(-50, 50, allow_nan=False)
size = st.floats(0.1, 30, allow_nan=False)
rects = st.builds(Rect, coord, coord, size, size)


def test_corners_derived_from_center_and_size():
    r = Rect(10, 5, 8, 4)
    assert r.corners() == (6, 3, 14, 7)
    assert Rect.from_corners(6, 3, 14, 7) == r


@pytest.mark.parametrize("w,h", [(0, 1), (1, 0), (-2, 3)])
def test_degenerate_rect_rejected(w, h):
    with pytest.raises(ValueError, match="degenerate"):
        Rect(0, 0, w, h)


def test_non_finite_rect_rejected():
    with pytest.raises(ValueError):
        Rect(math.nan, 0, 1, 1)


def test_iou_identity():
    r = Rect(3, 4, 2, 5)
    assert iou(r, r) == 1.0


def test_iou_disjoint():
    assert iou(Rect(0, 0, 2, 2), Rect(100, 0, 2, 2)) == 0.0


def test_iou_half_shifted():
    # intersection 1x2 = 2, union 4 + 4 - 2 = 6
    assert iou(Rect(1, 1, 2, 2), Rect(2, 1, 2, 2)) == pytest.approx(1 / 3, abs=1e-15)


def test_touching_edges_do_not_intersect():
    assert intersection_area(Rect(1, 1, 2, 2), Rect(3, 1, 2, 2)) == 0.0


def test_overlap_fraction_examples():
    r = Rect(1, 1, 2, 2)
    assert overlap_fraction_of_smaller(r, r) == 1.0
    assert overlap_fraction_of_smaller(Rect(5, 5, 1, 1), Rect(5, 5, 10, 10)) == 1.0
    # x-extents [0, 2] and [0, 4]: the small box is contained
    assert overlap_fraction_of_smaller(Rect(1, 1, 2, 2), Rect(2, 1, 4, 2)) == 1.0
    # x-extents [0, 2] and [1, 5]: intersection 1x2 = 2, smaller area 4
    assert overlap_fraction_of_smaller(Rect(1, 1, 2, 2), Rect(3, 1, 4, 2)) == 0.5


@given(rects, rects)
def test_iou_symmetric_and_bounded(a, b):
    v = iou(a, b)
    assert v == iou(b, a)
    assert 0.0 <= v <= 1.0
    assert v <= overlap_fraction_of_smaller(a, b) + 1e-12


@given(rects)
def test_iou_self_is_one(a):
    assert iou(a, a) == pytest.approx(1.0, rel=1e-12)


@given(st.lists(rects, min_size=1, max_size=8))
def test_bounding_rect_contains_members(rs):
    bb = bounding_rect(rs)
    assert all(bb.contains(r) for r in rs)


@given(st.floats(-20, 40), st.floats(0.01, 30), st.integers(1, 30))
def test_pixel_span_matches_enumeration(lo, width, n):
    hi = lo + width
    expected = [k for k in range(n) if lo <= k + 0.5 < hi]
    start, stop = pixel_span(lo, hi, n)
    assert list(range(start, stop)) == expected
