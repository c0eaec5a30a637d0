"""Ground-truth annotations and their JSON / JSON-lines serialization.

A word is ``{"text", "cx", "cy", "w", "h"}``; a page line is
``{"doc_id", "shape": [rows, cols], "words": [...]}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Rect

_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class WordAnnotation:
    text: str
    rect: Rect

    def __post_init__(self):
        if not self.text:
            raise ValueError("word text must be non-empty")

    def to_json(self) -> dict:
        r = self.rect
        return {"text": self.text, "cx": r.cx, "cy": r.cy, "w": r.w, "h": r.h}

    @classmethod
    def from_json(cls, obj: dict) -> "WordAnnotation":
        return cls(obj["text"], Rect(float(obj["cx"]), float(obj["cy"]), float(obj["w"]), float(obj["h"])))

    def transposed(self) -> "WordAnnotation":
        return WordAnnotation(self.text, self.rect.transposed())


@dataclass(frozen=True)
class CharAnnotation:
    symbol_index: int
    rect: Rect
    word_id: int

    def __post_init__(self):
        if self.symbol_index < 1:
            raise ValueError("character annotations cannot be background")


@dataclass(frozen=True)
class GroundTruthPage:
    shape: tuple[int, int]
    words: tuple[WordAnnotation, ...]
    chars: tuple[CharAnnotation, ...] = ()
    doc_id: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "chars", tuple(self.chars))
        rows, cols = self.shape
        if rows <= 0 or cols <= 0:
            raise ValueError(f"bad page shape {self.shape}")
        for c in self.chars:
            if not 0 <= c.word_id < len(self.words):
                raise ValueError(f"char references missing word {c.word_id}")
            r = c.rect
            if (
                r.left < -_EDGE_EPS
                or r.top < -_EDGE_EPS
                or r.right > cols + _EDGE_EPS
                or r.bottom > rows + _EDGE_EPS
            ):
                raise ValueError(f"char rect {r} outside page {self.shape}")

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "shape": list(self.shape),
            "words": [w.to_json() for w in self.words],
        }

    def transposed(self) -> "GroundTruthPage":
        """Mirror across the main diagonal: x<->y, rows<->cols."""
        return GroundTruthPage(
            (self.shape[1], self.shape[0]),
            [w.transposed() for w in self.words],
            [CharAnnotation(c.symbol_index, c.rect.transposed(), c.word_id) for c in self.chars],
            self.doc_id,
            dict(self.meta),
        )


def words_to_json(words) -> list[dict]:
    return [w.to_json() for w in words]


def words_from_json(objs) -> list[WordAnnotation]:
    return [WordAnnotation.from_json(o) for o in objs]


def dump_jsonl(records, path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False, sort_keys=True))
            f.write("\n")


def load_jsonl(path) -> list[dict]:
    out = []
    with open(Path(path), encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from e
    return out


def page_id(record: dict, index: int) -> str:
    return str(record.get("doc_id") or f"page{index:05d}")


def read_pages(path, charset=None, widths=None) -> list[GroundTruthPage]:
    """Load pages from JSON-lines; character boxes are re-derived from the words."""
    from .codec import page_from_words

    pages = []
    for i, rec in enumerate(load_jsonl(path)):
        pages.append(
            page_from_words(rec["shape"], words_from_json(rec["words"]), charset, widths, page_id(rec, i))
        )
    return pages


def write_pages(pages, path) -> None:
    dump_jsonl((p.to_json() for p in pages), path)
