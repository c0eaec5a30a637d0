from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

BACKGROUND = 0


@dataclass(frozen=True)
class Charset:
    """Ordered symbol table. Index 0 is background; symbols occupy 1..N.

    ``unknown`` must be one of ``symbols``; characters outside the table map
    to its index.
    """

    symbols: tuple[str, ...]
    unknown: str
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbols in charset")
        if any(len(s) != 1 for s in self.symbols):
            raise ValueError("charset symbols must be single characters")
        if self.unknown not in self.symbols:
            raise ValueError("unknown symbol must be part of the charset")
        object.__setattr__(self, "_index", {s: i + 1 for i, s in enumerate(self.symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def unknown_index(self) -> int:
        return self._index[self.unknown]

    @property
    def printable(self) -> tuple[str, ...]:
        """Symbols a generator may draw: everything except the unknown token."""
        return tuple(s for s in self.symbols if s != self.unknown)

    def index(self, symbol: str) -> int:
        return self._index.get(symbol, self.unknown_index)

    def symbol(self, index: int) -> str:
        if not 1 <= index <= len(self.symbols):
            raise IndexError(f"class index {index} outside 1..{len(self.symbols)}")
        return self.symbols[index - 1]

    def encode(self, text: str) -> list[int]:
        return [self.index(c) for c in text]

    def decode(self, indices) -> str:
        return "".join(self.symbol(int(i)) for i in indices)

    def to_json(self) -> dict:
        return {"symbols": list(self.symbols), "unknown": self.unknown}

    @classmethod
    def from_json(cls, obj: dict) -> "Charset":
        return cls(tuple(obj["symbols"]), obj["unknown"])

    @classmethod
    def load(cls, path) -> "Charset":
        with open(Path(path), encoding="utf-8") as f:
            return cls.from_json(json.load(f))


@lru_cache(maxsize=None)
def default_charset() -> Charset:
    """89 symbols: A-Z, a-z, 0-9, 26 punctuation marks, and U+FFFD as unknown."""
    text = resources.files("chargrid_ocr").joinpath("data/default_charset.json").read_text("utf-8")
    return Charset.from_json(json.loads(text))
