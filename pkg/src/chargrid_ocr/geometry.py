"""Axis-aligned rectangles in output-grid pixel coordinates.

Pixel ``(i, j)`` covers ``[j, j+1) x [i, i+1)`` and is sampled at its center
``(j + 0.5, i + 0.5)``; x follows the column index, y the row index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Rect:
    """Center/size rectangle. Degenerate sizes are rejected."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"degenerate rect: w={self.w}, h={self.h}")
        if not all(math.isfinite(v) for v in (self.cx, self.cy, self.w, self.h)):
            raise ValueError(f"non-finite rect: {self}")

    @classmethod
    def from_corners(cls, left: float, top: float, right: float, bottom: float) -> "Rect":
        return cls((left + right) / 2, (top + bottom) / 2, right - left, bottom - top)

    @property
    def left(self) -> float:
        return self.cx - self.w / 2

    @property
    def right(self) -> float:
        return self.cx + self.w / 2

    @property
    def top(self) -> float:
        return self.cy - self.h / 2

    @property
    def bottom(self) -> float:
        return self.cy + self.h / 2

    @property
    def area(self) -> float:
        # from corners, like intersection_area, so a box fully inside another scores exactly 1
        return (self.right - self.left) * (self.bottom - self.top)

    def corners(self) -> tuple[float, float, float, float]:
        return self.left, self.top, self.right, self.bottom

    def contains(self, other: "Rect", eps: float = 1e-9) -> bool:
        return (
            self.left <= other.left + eps
            and self.top <= other.top + eps
            and self.right >= other.right - eps
            and self.bottom >= other.bottom - eps
        )

    def transposed(self) -> "Rect":
        return Rect(self.cy, self.cx, self.h, self.w)


def intersection_area(a: Rect, b: Rect) -> float:
    iw = min(a.right, b.right) - max(a.left, b.left)
    ih = min(a.bottom, b.bottom) - max(a.top, b.top)
    if iw <= 0 or ih <= 0:
        return 0.0
    return iw * ih


def iou(a: Rect, b: Rect) -> float:
    inter = intersection_area(a, b)
    if inter == 0.0:
        return 0.0
    return inter / (a.area + b.area - inter)


def overlap_fraction_of_smaller(a: Rect, b: Rect) -> float:
    inter = intersection_area(a, b)
    if inter == 0.0:
        return 0.0
    return inter / min(a.area, b.area)


def bounding_rect(rects) -> Rect:
    rects = list(rects)
    if not rects:
        raise ValueError("bounding_rect of nothing")
    return Rect.from_corners(
        min(r.left for r in rects),
        min(r.top for r in rects),
        max(r.right for r in rects),
        max(r.bottom for r in rects),
    )


def pixel_span(lo: float, hi: float, size: int) -> tuple[int, int]:
    """Half-open index range of pixels whose sample point ``k + 0.5`` lies in ``[lo, hi)``.

    Clipped to ``[0, size)``; may be empty (start >= stop).
    """
    start = max(math.ceil(lo - 0.5), 0)
    stop = min(math.ceil(hi - 0.5), size)
    return start, stop


def pixel_of(x: float, y: float) -> tuple[int, int]:
    """(row, col) of the pixel whose unit square contains the point."""
    return math.floor(y), math.floor(x)
