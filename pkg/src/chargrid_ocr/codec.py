"""Ground truth -> network-output targets, and the scalar decodings used downstream."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .annotations import CharAnnotation, GroundTruthPage, WordAnnotation
from .charset import Charset, default_charset
from .geometry import Rect, pixel_span
from .grids import NetworkOutput


def encode_word_offset(delta):
    """sign(d) * log(|d| + 1). Works on scalars and arrays."""
    out = np.sign(delta) * np.log1p(np.abs(delta))
    return float(out) if np.ndim(out) == 0 else out


def decode_word_offset(v):
    """sign(v) * (exp(|v|) - 1), the exact inverse of :func:`encode_word_offset`."""
    out = np.sign(v) * np.expm1(np.abs(v))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class WidthTable:
    """Relative advance width per symbol; anything not listed gets ``default``."""

    widths: dict = field(default_factory=dict)
    default: float = 1.0

    def __post_init__(self):
        if not self.default > 0 or any(not w > 0 for w in self.widths.values()):
            raise ValueError("character widths must be positive")

    def __call__(self, symbol: str) -> float:
        return self.widths.get(symbol, self.default)

    @classmethod
    def uniform(cls) -> "WidthTable":
        return cls()


def approximate_char_boxes(
    word: WordAnnotation,
    widths: WidthTable | None = None,
    charset: Charset | None = None,
    word_id: int = 0,
) -> list[CharAnnotation]:
    """Split the word box horizontally, each character taking a share proportional to its width."""
    if not word.text:
        raise ValueError("cannot split an empty word")
    widths = widths or WidthTable.uniform()
    charset = charset or default_charset()
    if len(word.text) == 1:
        return [CharAnnotation(charset.index(word.text), word.rect, word_id)]
    rel = [widths(c) for c in word.text]
    total = math.fsum(rel)
    r = word.rect
    left, right = r.left, r.right
    edges = [left]
    acc = 0.0
    for wi in rel[:-1]:
        acc += wi
        edges.append(left + r.w * (acc / total))
    edges.append(right)
    return [
        CharAnnotation(
            charset.index(ch),
            Rect((edges[k] + edges[k + 1]) / 2, r.cy, edges[k + 1] - edges[k], r.h),
            word_id,
        )
        for k, ch in enumerate(word.text)
    ]


def page_from_words(shape, words, charset=None, widths=None, doc_id: str = "") -> GroundTruthPage:
    words = list(words)
    chars = []
    for k, w in enumerate(words):
        chars.extend(approximate_char_boxes(w, widths, charset, word_id=k))
    return GroundTruthPage(tuple(shape), words, chars, doc_id)


def encode_page(page: GroundTruthPage, charset: Charset | None = None, warnings: list | None = None) -> NetworkOutput:
    """Rasterize the page's character boxes into the eight target grids.

    A pixel belongs to a box when its sample point lies inside it (half-open
    on the right/bottom); later characters overwrite earlier ones. Indices of
    characters that cover no pixel at all are appended to ``warnings``.
    """
    rows, cols = page.shape
    S = np.zeros((rows, cols), dtype=np.int64)
    Bc, Xc, Yc, Wc, Hc, Xw, Yw = (np.zeros((rows, cols)) for _ in range(7))

    for k, ch in enumerate(page.chars):
        b = ch.rect
        word = page.words[ch.word_id].rect
        i0, i1 = pixel_span(b.top, b.bottom, rows)
        j0, j1 = pixel_span(b.left, b.right, cols)
        if i0 >= i1 or j0 >= j1:
            if warnings is not None:
                warnings.append(k)
            continue
        ys = (np.arange(i0, i1) + 0.5)[:, None]
        xs = (np.arange(j0, j1) + 0.5)[None, :]
        block = (slice(i0, i1), slice(j0, j1))
        S[block] = ch.symbol_index
        Bc[block] = 1.0
        Xc[block] = b.cx - xs
        Yc[block] = b.cy - ys
        Wc[block] = math.log(b.w)
        Hc[block] = math.log(b.h)
        Xw[block] = encode_word_offset(word.cx - xs)
        Yw[block] = encode_word_offset(word.cy - ys)

    return NetworkOutput(S=S, Bc=Bc, Xc=Xc, Yc=Yc, Wc=Wc, Hc=Hc, Xw=Xw, Yw=Yw)
