"""Synthetic ground-truth pages (layout only) and tensor-space corruption.

There is no trained network here: a page is generated as word annotations,
encoded into the target grids, and the grids are perturbed directly to
imitate prediction error.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .annotations import GroundTruthPage, WordAnnotation
from .charset import Charset, default_charset
from .codec import page_from_words
from .geometry import Rect
from .grids import NetworkOutput
from .rng import ALGORITHM, SplitMix64, derive_seed


@dataclass(frozen=True)
class PageConfig:
    shape: tuple[int, int] = (128, 256)
    columns: int = 1
    char_w: float = 4.0
    char_h: float = 6.0
    word_len_range: tuple[int, int] = (3, 8)
    words_per_line_range: tuple[int, int] = (4, 10)
    line_spacing: float = 0.5
    rotation: int = 0
    seed: int = 0
    margin: float = 4.0
    gutter: float = 12.0

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(v) for v in self.shape))
        object.__setattr__(self, "word_len_range", tuple(int(v) for v in self.word_len_range))
        object.__setattr__(self, "words_per_line_range", tuple(int(v) for v in self.words_per_line_range))
        if not 1 <= self.columns <= 3:
            raise ValueError("columns must be 1, 2 or 3")
        if self.rotation not in (0, 90):
            raise ValueError("rotation must be 0 or 90")
        if not (self.char_w >= 1 and self.char_h >= 1):
            raise ValueError("characters must be at least one pixel in each direction")
        for name in ("word_len_range", "words_per_line_range"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise ValueError(f"{name} must satisfy 1 <= min <= max")
        if self.line_spacing < 0 or self.margin < 0 or self.gutter < 0:
            raise ValueError("spacings must be non-negative")

    @classmethod
    def from_json(cls, obj: dict) -> "PageConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown page config keys: {sorted(unknown)}")
        return cls(**obj)

    def to_json(self) -> dict:
        d = asdict(self)
        d["shape"] = list(self.shape)
        d["word_len_range"] = list(self.word_len_range)
        d["words_per_line_range"] = list(self.words_per_line_range)
        return d


@dataclass(frozen=True)
class NoiseConfig:
    reg_sigma: float = 0.0
    mask_flip_p: float = 0.0
    bc_jitter_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.reg_sigma < 0 or self.bc_jitter_sigma < 0:
            raise ValueError("noise standard deviations must be non-negative")
        if not 0 <= self.mask_flip_p < 1:
            raise ValueError("mask_flip_p must lie in [0, 1)")

    @classmethod
    def from_json(cls, obj: dict) -> "NoiseConfig":
        return cls(**obj)

    def to_json(self) -> dict:
        return asdict(self)


def load_config(path, cls):
    with open(Path(path), encoding="utf-8") as f:
        return cls.from_json(json.load(f))


def generate_page(cfg: PageConfig, charset: Charset | None = None, doc_id: str = "") -> GroundTruthPage:
    """Lay out random words left-to-right, top-to-bottom, column by column.

    Words are ``len * char_w`` wide and ``char_h`` tall; gaps between words
    are drawn from ``[1.5, 3] * char_w``; consecutive lines are separated by
    ``line_spacing * char_h``. A 90 degree rotation transposes the finished
    page, so its shape becomes ``(cols, rows)``.
    """
    charset = charset or default_charset()
    alphabet = charset.printable
    rng = SplitMix64(cfg.seed)
    rows, cols = cfg.shape

    usable_w = cols - 2 * cfg.margin - (cfg.columns - 1) * cfg.gutter
    col_w = usable_w / cfg.columns
    pitch = cfg.char_h * (1 + cfg.line_spacing)
    # one pixel of slack absorbs the random sub-pixel page offset
    usable_h = rows - 2 * cfg.margin - 1
    n_lines = math.floor((usable_h + cfg.line_spacing * cfg.char_h) / pitch) if usable_h >= cfg.char_h else 0
    min_word = cfg.word_len_range[0] * cfg.char_w
    if n_lines < 1 or col_w < min_word + cfg.char_w:
        raise ValueError(f"degenerate layout: {cfg.shape} fits no line of text")

    dy = rng.uniform1(0.0, 1.0)
    words = []
    for c in range(cfg.columns):
        x0 = cfg.margin + c * (col_w + cfg.gutter)
        x_end = x0 + col_w
        for line in range(n_lines):
            top = cfg.margin + dy + line * pitch
            n_words = rng.randint(*cfg.words_per_line_range)
            x = x0 + rng.uniform1(0.0, cfg.char_w)
            for _ in range(n_words):
                length = rng.randint(*cfg.word_len_range)
                width = length * cfg.char_w
                if x + width > x_end:
                    break
                text = "".join(alphabet[k] for k in rng.integers(0, len(alphabet), length))
                words.append(WordAnnotation(text, Rect.from_corners(x, top, x + width, top + cfg.char_h)))
                x += width + rng.uniform1(1.5, 3.0) * cfg.char_w

    page = page_from_words(cfg.shape, words, charset, None, doc_id)
    if cfg.rotation == 90:
        page = page.transposed()
    return page


# sub-stream keys so each grid's noise is independent of the others
_NOISE_KEYS = {"Xc": 1, "Yc": 2, "Wc": 3, "Hc": 4, "Xw": 5, "Yw": 6, "Bc": 7, "S": 8}


def corrupt_output(out: NetworkOutput, noise: NoiseConfig, charset: Charset | None = None) -> NetworkOutput:
    """Gaussian noise on the six regression grids, random class flips on
    foreground chargrid pixels, clamped jitter on the box mask."""
    charset = charset or default_charset()
    shape = out.shape
    n = shape[0] * shape[1]
    stream = lambda name: SplitMix64(derive_seed(noise.seed, _NOISE_KEYS[name]))  # noqa: E731
    changed = {}

    if noise.reg_sigma > 0:
        for name in ("Xc", "Yc", "Wc", "Hc", "Xw", "Yw"):
            changed[name] = getattr(out, name) + noise.reg_sigma * stream(name).normal(n).reshape(shape)

    if noise.bc_jitter_sigma > 0:
        jitter = noise.bc_jitter_sigma * stream("Bc").normal(n).reshape(shape)
        changed["Bc"] = np.clip(out.Bc + jitter, 0.0, 1.0)

    if noise.mask_flip_p > 0:
        rs = stream("S")
        flip = (rs.random(n).reshape(shape) < noise.mask_flip_p) & (out.S != 0)
        new_cls = rs.integers(1, len(charset) + 1, n).reshape(shape)
        changed["S"] = np.where(flip, new_cls, out.S)

    return out.replace(**changed) if changed else out


def page_seed(seed: int, index: int) -> int:
    return derive_seed(seed, index)


def generate_corpus(n_pages: int, seed: int, cfg: PageConfig | None = None, charset=None) -> list[GroundTruthPage]:
    """``n_pages`` pages with per-page seeds derived from ``seed``."""
    cfg = cfg or PageConfig()
    pages = []
    for k in range(n_pages):
        page_cfg = PageConfig(**{**asdict(cfg), "seed": page_seed(seed, k)})
        pages.append(generate_page(page_cfg, charset, doc_id=f"page{k:05d}"))
    return pages


def corpus_metadata(n_pages: int, seed: int, cfg: PageConfig, noise: NoiseConfig | None) -> dict:
    return {
        "prng": ALGORITHM,
        "seed": seed,
        "pages": n_pages,
        "page_config": cfg.to_json(),
        "noise": noise.to_json() if noise else None,
        "page_seed_rule": "derive_seed(seed, page_index)",
        "noise_seed_rule": "derive_seed(noise.seed, page_index)",
    }
