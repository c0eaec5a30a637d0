"""Character-box decoding: candidate extraction, Graphcore filtering and NMS.

Candidates are kept column-wise in :class:`Candidates` (one numpy array per
field) because a page routinely yields 10^4-10^5 of them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Rect
from .grids import NetworkOutput

DEFAULT_TAU = 0.5
DEFAULT_THETA = 0.5


@dataclass(frozen=True)
class CandidateBox:
    source_pixel: tuple[int, int]
    rect: Rect
    score: float


@dataclass(frozen=True)
class CharBox:
    rect: Rect
    score: float
    symbol_index: int = 0


@dataclass(frozen=True, eq=False)
class Candidates:
    """Column store of candidate boxes, in row-major source-pixel order."""

    rows: np.ndarray
    cols: np.ndarray
    cx: np.ndarray
    cy: np.ndarray
    w: np.ndarray
    h: np.ndarray
    score: np.ndarray
    n_dropped: int = 0

    def __len__(self) -> int:
        return len(self.score)

    def take(self, idx) -> "Candidates":
        return Candidates(
            self.rows[idx], self.cols[idx], self.cx[idx], self.cy[idx],
            self.w[idx], self.h[idx], self.score[idx], self.n_dropped,
        )

    def box(self, k: int) -> CandidateBox:
        return CandidateBox(
            (int(self.rows[k]), int(self.cols[k])),
            Rect(float(self.cx[k]), float(self.cy[k]), float(self.w[k]), float(self.h[k])),
            float(self.score[k]),
        )

    def boxes(self) -> list[CandidateBox]:
        return [self.box(k) for k in range(len(self))]

    @classmethod
    def from_boxes(cls, boxes) -> "Candidates":
        boxes = list(boxes)
        return cls(
            np.array([b.source_pixel[0] for b in boxes], dtype=np.int64),
            np.array([b.source_pixel[1] for b in boxes], dtype=np.int64),
            np.array([b.rect.cx for b in boxes], dtype=np.float64),
            np.array([b.rect.cy for b in boxes], dtype=np.float64),
            np.array([b.rect.w for b in boxes], dtype=np.float64),
            np.array([b.rect.h for b in boxes], dtype=np.float64),
            np.array([b.score for b in boxes], dtype=np.float64),
        )

    @classmethod
    def concat(cls, parts) -> "Candidates":
        parts = list(parts)
        cat = lambda name: np.concatenate([getattr(p, name) for p in parts])  # noqa: E731
        return cls(
            cat("rows"), cat("cols"), cat("cx"), cat("cy"), cat("w"), cat("h"), cat("score"),
            sum(p.n_dropped for p in parts),
        )

    def char_boxes(self, idx=None) -> list[CharBox]:
        idx = range(len(self)) if idx is None else idx
        return [
            CharBox(Rect(float(self.cx[k]), float(self.cy[k]), float(self.w[k]), float(self.h[k])),
                    float(self.score[k]))
            for k in idx
        ]


def extract_candidates(out: NetworkOutput, tau: float = DEFAULT_TAU) -> Candidates:
    """One candidate per pixel with ``Bc >= tau``.

    Candidates whose decoded box is non-finite or has zero size (exp
    under/overflow of a corrupted log-size) are dropped and counted in
    ``n_dropped``.
    """
    if not 0 < tau < 1:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    rows, cols = np.nonzero(out.Bc >= tau)
    with np.errstate(over="ignore", invalid="ignore"):
        cx = (cols + 0.5) + out.Xc[rows, cols]
        cy = (rows + 0.5) + out.Yc[rows, cols]
        w = np.exp(out.Wc[rows, cols])
        h = np.exp(out.Hc[rows, cols])
    ok = np.isfinite(cx) & np.isfinite(cy) & np.isfinite(w) & np.isfinite(h) & (w > 0) & (h > 0)
    return Candidates(
        rows[ok].astype(np.int64), cols[ok].astype(np.int64),
        cx[ok], cy[ok], w[ok], h[ok], out.Bc[rows, cols][ok].astype(np.float64),
        n_dropped=int((~ok).sum()),
    )


def center_targets(cands: Candidates, shape) -> np.ndarray:
    """For each candidate, the index of the candidate at its predicted center pixel, or -1."""
    n_rows, n_cols = shape
    lookup = np.full((n_rows, n_cols), -1, dtype=np.int64)
    lookup[cands.rows, cands.cols] = np.arange(len(cands))
    ti = np.floor(cands.cy)
    tj = np.floor(cands.cx)
    inside = (ti >= 0) & (ti < n_rows) & (tj >= 0) & (tj < n_cols)
    target = np.full(len(cands), -1, dtype=np.int64)
    target[inside] = lookup[ti[inside].astype(np.int64), tj[inside].astype(np.int64)]
    return target


def cycle_members(target: np.ndarray) -> np.ndarray:
    """Boolean mask of vertices lying on a cycle of a graph with out-degree <= 1.

    ``target[v]`` is v's successor or -1. Vertices of in-degree zero are
    peeled repeatedly; each vertex and edge is touched once, so the cost is
    linear in the vertex count.
    """
    n = len(target)
    has_edge = target >= 0
    indeg = np.bincount(target[has_edge], minlength=n)
    alive = np.ones(n, dtype=bool)
    frontier = np.flatnonzero(indeg == 0)
    while frontier.size:
        alive[frontier] = False
        succ = target[frontier]
        succ = succ[succ >= 0]
        np.subtract.at(indeg, succ, 1)
        succ = succ[(indeg[succ] == 0) & alive[succ]]
        frontier = np.unique(succ)
    # survivors with no out-edge cannot be on a cycle; after peeling every
    # survivor has in-degree >= 1, and a dead end would still need one.
    return alive & has_edge


def graphcore_filter(cands: Candidates, shape) -> Candidates:
    """Keep only candidates on directed cycles of the predicted-center graph."""
    if len(cands) == 0:
        return cands
    keep = cycle_members(center_targets(cands, shape))
    return cands.take(np.flatnonzero(keep))


def _processing_order(cands: Candidates) -> np.ndarray:
    # score descending, then row-major source pixel
    return np.lexsort((cands.cols, cands.rows, -cands.score))


def _iou_many(l, t, r, b, area, k, others):
    """IoU of box ``k`` against each index in ``others`` (same arithmetic as geometry.iou)."""
    iw = np.minimum(r[k], r[others]) - np.maximum(l[k], l[others])
    ih = np.minimum(b[k], b[others]) - np.maximum(t[k], t[others])
    inter = np.where((iw > 0) & (ih > 0), iw * ih, 0.0)
    union = area[k] + area[others] - inter
    return np.where(inter > 0, inter / union, 0.0)


def _corners(cands: Candidates):
    l = cands.cx - cands.w / 2
    r = cands.cx + cands.w / 2
    t = cands.cy - cands.h / 2
    b = cands.cy + cands.h / 2
    return l, t, r, b, (r - l) * (b - t)


def nms_indices(cands: Candidates, theta: float = DEFAULT_THETA) -> np.ndarray:
    """Greedy NMS with a uniform spatial hash; returns kept indices in kept order.

    Boxes that overlap at all have centers less than one cell apart when the
    cell side is the largest box dimension, so only the 3x3 neighbouring
    cells need checking.
    """
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    n = len(cands)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    l, t, r, b, area = _corners(cands)
    order = _processing_order(cands)
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)

    cell = float(max(cands.w.max(), cands.h.max()))
    gx = np.floor(cands.cx / cell).astype(np.int64)
    gy = np.floor(cands.cy / cell).astype(np.int64)
    key_order = np.lexsort((gx, gy))
    buckets: dict[tuple[int, int], np.ndarray] = {}
    if n:
        keys = np.stack([gy[key_order], gx[key_order]], axis=1)
        change = np.flatnonzero(np.any(np.diff(keys, axis=0) != 0, axis=1)) + 1
        for chunk in np.split(key_order, change):
            buckets[(int(gy[chunk[0]]), int(gx[chunk[0]]))] = chunk

    suppressed = np.zeros(n, dtype=bool)
    kept = []
    for k in order:
        if suppressed[k]:
            continue
        kept.append(k)
        suppressed[k] = True
        cy0, cx0 = int(gy[k]), int(gx[k])
        near = [
            buckets[(yy, xx)]
            for yy in (cy0 - 1, cy0, cy0 + 1)
            for xx in (cx0 - 1, cx0, cx0 + 1)
            if (yy, xx) in buckets
        ]
        others = np.concatenate(near)
        others = others[~suppressed[others] & (rank[others] > rank[k])]
        if others.size:
            hit = _iou_many(l, t, r, b, area, k, others) > theta
            suppressed[others[hit]] = True
    return np.asarray(kept, dtype=np.int64)


def nms_bruteforce_indices(cands: Candidates, theta: float = DEFAULT_THETA) -> np.ndarray:
    """Textbook greedy NMS: every kept box is compared with every remaining box."""
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if len(cands) == 0:
        return np.zeros(0, dtype=np.int64)
    l, t, r, b, area = _corners(cands)
    remaining = _processing_order(cands)
    kept = []
    while remaining.size:
        k = remaining[0]
        kept.append(k)
        rest = remaining[1:]
        remaining = rest[_iou_many(l, t, r, b, area, k, rest) <= theta]
    return np.asarray(kept, dtype=np.int64)


def nms(cands: Candidates, theta: float = DEFAULT_THETA) -> list[CharBox]:
    return cands.char_boxes(nms_indices(cands, theta))


def nms_bruteforce(cands: Candidates, theta: float = DEFAULT_THETA) -> list[CharBox]:
    return cands.char_boxes(nms_bruteforce_indices(cands, theta))


def detect_char_boxes(
    out: NetworkOutput,
    tau: float = DEFAULT_TAU,
    theta: float = DEFAULT_THETA,
    graphcore: bool = True,
) -> tuple[list[CharBox], dict]:
    """extract -> (graphcore) -> nms, plus counts for reporting."""
    cands = extract_candidates(out, tau)
    filtered = graphcore_filter(cands, out.shape) if graphcore else cands
    boxes = nms(filtered, theta)
    stats = {
        "n_candidates": len(cands),
        "n_dropped_nonfinite": cands.n_dropped,
        "n_after_graphcore": len(filtered),
        "n_char_boxes": len(boxes),
    }
    return boxes, stats
