"""From labelled character boxes to words: class voting, word proposals, clustering, reading order."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .charset import BACKGROUND, Charset, default_charset
from .codec import decode_word_offset
from .detect import DEFAULT_TAU, DEFAULT_THETA, CharBox, detect_char_boxes
from .geometry import Rect, bounding_rect, pixel_span
from .grids import NetworkOutput

OVERLAP_LINK = 0.5
_AXIS_TIE_EPS = 1e-6


class UnsampleableBox(ValueError):
    """The box covers no pixel sample point of the grid."""


@dataclass(frozen=True)
class WordProposal:
    char_index: int
    rect: Rect


@dataclass(frozen=True)
class Word:
    text: str
    rect: Rect
    char_indices: tuple[int, ...]

    def to_json(self, boxes=None) -> dict:
        r = self.rect
        obj = {"text": self.text, "cx": r.cx, "cy": r.cy, "w": r.w, "h": r.h}
        if boxes is not None:
            obj["chars"] = [
                {
                    "symbol_index": boxes[k].symbol_index,
                    "score": boxes[k].score,
                    "cx": boxes[k].rect.cx, "cy": boxes[k].rect.cy,
                    "w": boxes[k].rect.w, "h": boxes[k].rect.h,
                }
                for k in self.char_indices
            ]
        return obj


@dataclass
class DecodeReport:
    n_candidates: int = 0
    n_dropped_nonfinite: int = 0
    n_after_graphcore: int = 0
    n_char_boxes: int = 0
    n_boxes_outside_grid: int = 0
    n_unsampleable_word_center: int = 0

    def warnings(self) -> dict:
        return {
            k: v
            for k, v in vars(self).items()
            if k in ("n_dropped_nonfinite", "n_boxes_outside_grid", "n_unsampleable_word_center") and v
        }


@dataclass(frozen=True)
class PageDecoding:
    words: list
    chars: list
    report: DecodeReport = field(default_factory=DecodeReport)


def _block(rect: Rect, shape):
    i0, i1 = pixel_span(rect.top, rect.bottom, shape[0])
    j0, j1 = pixel_span(rect.left, rect.right, shape[1])
    if i0 >= i1 or j0 >= j1:
        return None
    return slice(i0, i1), slice(j0, j1)


def assign_class(box: CharBox, S, charset: Charset | None = None, report: DecodeReport | None = None) -> int:
    """Majority vote of the chargrid over pixels sampled inside the box.

    Background is ignored; ties go to the smaller class index; a box with
    only background falls back to the unknown index.
    """
    charset = charset or default_charset()
    S = np.asarray(getattr(S, "values", S))
    block = _block(box.rect, S.shape)
    if block is None:
        if report is not None:
            report.n_boxes_outside_grid += 1
        return charset.unknown_index
    votes = np.bincount(S[block].ravel().astype(np.int64))
    if len(votes) > BACKGROUND:
        votes[BACKGROUND] = 0
    if votes.size == 0 or votes.max() == 0:
        return charset.unknown_index
    # argmax returns the first maximum, i.e. the smallest index
    return int(np.argmax(votes))


def predicted_word_center(box: CharBox, Xw, Yw) -> tuple[float, float]:
    """Component-wise median of the word centers decoded at each in-box pixel."""
    Xw = np.asarray(getattr(Xw, "values", Xw))
    Yw = np.asarray(getattr(Yw, "values", Yw))
    block = _block(box.rect, Xw.shape)
    if block is None:
        raise UnsampleableBox(f"unsampleable box {box.rect}")
    ys, xs = block
    px = np.arange(xs.start, xs.stop) + 0.5
    py = np.arange(ys.start, ys.stop) + 0.5
    cx = px[None, :] + decode_word_offset(Xw[block].astype(np.float64))
    cy = py[:, None] + decode_word_offset(Yw[block].astype(np.float64))
    return float(np.median(cx)), float(np.median(cy))


def word_proposal(box: CharBox, center, char_index: int = 0) -> WordProposal:
    """Box spanning the character and its point reflection through ``center``."""
    wx, wy = center
    r = box.rect
    left = min(r.left, 2 * wx - r.right)
    right = max(r.right, 2 * wx - r.left)
    top = min(r.top, 2 * wy - r.bottom)
    bottom = max(r.bottom, 2 * wy - r.top)
    return WordProposal(char_index, Rect.from_corners(left, top, right, bottom))


def linked_pairs(rects, threshold: float = OVERLAP_LINK) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (a < b) whose intersection exceeds ``threshold`` of the smaller area.

    Sweep over x: after sorting by left edge, each box only meets the boxes
    whose left edge lies before its right edge.
    """
    n = len(rects)
    if n < 2:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    l = np.array([r.left for r in rects])
    t = np.array([r.top for r in rects])
    rr = np.array([r.right for r in rects])
    b = np.array([r.bottom for r in rects])
    area = (rr - l) * (b - t)
    order = np.argsort(l, kind="stable")
    ls = l[order]
    src, dst = [], []
    for pos in range(n):
        a = order[pos]
        stop = np.searchsorted(ls, rr[a], side="left")
        if stop <= pos + 1:
            continue
        cand = order[pos + 1:stop]
        iw = np.minimum(rr[a], rr[cand]) - np.maximum(l[a], l[cand])
        ih = np.minimum(b[a], b[cand]) - np.maximum(t[a], t[cand])
        inter = np.where((iw > 0) & (ih > 0), iw * ih, 0.0)
        frac = inter / np.minimum(area[a], area[cand])
        hit = cand[frac > threshold]
        if hit.size:
            src.append(np.minimum(a, hit))
            dst.append(np.maximum(a, hit))
    if not src:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(src), np.concatenate(dst)


def _canonical_components(labels: np.ndarray, boxes) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for k, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(k)
    comps = list(groups.values())

    def key(comp):
        bb = bounding_rect(boxes[k].rect for k in comp)
        return (bb.top, bb.left, comp[0])

    return sorted(comps, key=key)


def cluster_words(boxes, proposals) -> list[list[int]]:
    """Connected components of the proposal-overlap graph.

    Components come back as sorted index lists, ordered by the (top, left)
    corner of their members' bounding box.
    """
    n = len(boxes)
    if len(proposals) != n:
        raise ValueError("need exactly one proposal per box")
    if n == 0:
        return []
    by_char = sorted(proposals, key=lambda p: p.char_index)
    src, dst = linked_pairs([p.rect for p in by_char])
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    return _canonical_components(labels, boxes)


def reading_axis(points: np.ndarray) -> np.ndarray:
    """Unit direction of maximal spread, oriented to point along +x (or +y when vertical)."""
    if len(points) < 2:
        return np.array([1.0, 0.0])
    centered = points - points.mean(axis=0)
    cov = centered.T @ centered
    if not np.any(cov):
        return np.array([1.0, 0.0])
    _, vecs = np.linalg.eigh(cov)
    axis = vecs[:, -1]
    # float32 grids leave ~1e-7 px jitter in centers of a vertical word
    if abs(axis[0]) <= _AXIS_TIE_EPS:
        return np.array([0.0, 1.0])
    return -axis if axis[0] < 0 else axis


def assemble_word(cluster, boxes, charset: Charset | None = None) -> Word:
    """Order member characters along the cluster's principal axis and concatenate."""
    charset = charset or default_charset()
    if not cluster:
        raise ValueError("empty cluster")
    members = list(cluster)
    pts = np.array([[boxes[k].rect.cx, boxes[k].rect.cy] for k in members])
    axis = reading_axis(pts)
    proj = pts @ axis
    ordered = [members[p] for p in sorted(range(len(members)), key=lambda p: (proj[p], members[p]))]
    text = "".join(
        charset.symbol(boxes[k].symbol_index) if boxes[k].symbol_index else charset.unknown
        for k in ordered
    )
    return Word(text, bounding_rect(boxes[k].rect for k in ordered), tuple(ordered))


def decode_page_full(
    out: NetworkOutput,
    charset: Charset | None = None,
    tau: float = DEFAULT_TAU,
    theta: float = DEFAULT_THETA,
    graphcore: bool = True,
) -> PageDecoding:
    charset = charset or default_charset()
    raw, stats = detect_char_boxes(out, tau, theta, graphcore)
    report = DecodeReport(**stats)
    boxes = [replace(b, symbol_index=assign_class(b, out.S, charset, report)) for b in raw]
    proposals = []
    for k, b in enumerate(boxes):
        try:
            center = predicted_word_center(b, out.Xw, out.Yw)
        except UnsampleableBox:
            report.n_unsampleable_word_center += 1
            center = (b.rect.cx, b.rect.cy)
        proposals.append(word_proposal(b, center, k))
    clusters = cluster_words(boxes, proposals)
    words = [assemble_word(c, boxes, charset) for c in clusters]
    return PageDecoding(words, boxes, report)


def decode_page(
    out: NetworkOutput,
    charset: Charset | None = None,
    tau: float = DEFAULT_TAU,
    theta: float = DEFAULT_THETA,
    graphcore: bool = True,
) -> list[Word]:
    return decode_page_full(out, charset, tau, theta, graphcore).words
