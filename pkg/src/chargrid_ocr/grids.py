"""Dense per-pixel grids, the eight-grid network output bundle, and the CGRD file format.

CGRD layout (little-endian)::

    b"CGRD" | u32 version=1 | u32 rows | u32 cols | u8 dtype | row-major payload

dtype 0 is a class-index grid stored as u16, dtype 1 a real grid stored as f32.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

MAGIC = b"CGRD"
VERSION = 1
_HEADER = struct.Struct("<4sIIIB")

CLASS_INDEX = "class-index"
REAL = "real"
_DTYPE_CODES = {CLASS_INDEX: 0, REAL: 1}
_STORAGE = {CLASS_INDEX: np.dtype("<u2"), REAL: np.dtype("<f4")}

# file suffix -> NetworkOutput field
GRID_NAMES = ("S", "Bc", "Xc", "Yc", "Wc", "Hc", "Xw", "Yw")


class GridFormatError(ValueError):
    """Malformed CGRD file. ``reason`` is one of the fixed short tags below."""

    BAD_MAGIC = "bad magic"
    TRUNCATED_HEADER = "truncated header"
    BAD_VERSION = "unsupported version"
    BAD_DTYPE = "unknown dtype"
    TRUNCATED_PAYLOAD = "truncated payload"
    LENGTH_MISMATCH = "length mismatch"

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


class Grid:
    """Immutable 2-D array tagged as class-index or real.

    Class-index grids hold ``uint16``; real grids keep the float dtype they
    were built with. Only ``float32`` real grids survive a file round trip
    bit-exactly, since that is the on-disk precision.
    """

    __slots__ = ("values", "kind")

    def __init__(self, values, kind: str):
        if kind not in _DTYPE_CODES:
            raise ValueError(f"unknown grid kind {kind!r}")
        arr = np.array(values, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"grid must be 2-D, got shape {arr.shape}")
        if kind == CLASS_INDEX:
            if arr.size and (arr.min() < 0 or arr.max() > np.iinfo(np.uint16).max):
                raise ValueError("class indices must fit in u16")
            arr = arr.astype(np.uint16)
        elif not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, name, value):
        raise AttributeError("Grid is immutable")

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.values.dtype == other.values.dtype
            and self.values.shape == other.values.shape
            and self.values.tobytes() == other.values.tobytes()
        )

    def __repr__(self):
        return f"Grid({self.kind}, {self.rows}x{self.cols}, {self.values.dtype})"


def grid_to_bytes(g: Grid) -> bytes:
    header = _HEADER.pack(MAGIC, VERSION, g.rows, g.cols, _DTYPE_CODES[g.kind])
    payload = np.ascontiguousarray(g.values, dtype=_STORAGE[g.kind]).tobytes()
    return header + payload


def grid_from_bytes(data: bytes) -> Grid:
    if len(data) < 4 or data[:4] != MAGIC:
        raise GridFormatError(GridFormatError.BAD_MAGIC)
    if len(data) < _HEADER.size:
        raise GridFormatError(GridFormatError.TRUNCATED_HEADER, f"{len(data)} bytes")
    _, version, rows, cols, code = _HEADER.unpack_from(data)
    if version != VERSION:
        raise GridFormatError(GridFormatError.BAD_VERSION, str(version))
    kinds = {v: k for k, v in _DTYPE_CODES.items()}
    if code not in kinds:
        raise GridFormatError(GridFormatError.BAD_DTYPE, str(code))
    kind = kinds[code]
    storage = _STORAGE[kind]
    payload = data[_HEADER.size:]
    if len(payload) % storage.itemsize:
        raise GridFormatError(
            GridFormatError.TRUNCATED_PAYLOAD,
            f"{len(payload)} bytes is not a whole number of {storage.itemsize}-byte values",
        )
    n = len(payload) // storage.itemsize
    if n != rows * cols:
        raise GridFormatError(
            GridFormatError.LENGTH_MISMATCH, f"header {rows}x{cols}={rows * cols}, payload {n}"
        )
    values = np.frombuffer(payload, dtype=storage).reshape(rows, cols)
    if kind == REAL:
        values = values.astype(np.float32)
    return Grid(values, kind)


def grid_write(g: Grid, path) -> None:
    Path(path).write_bytes(grid_to_bytes(g))


def grid_read(path) -> Grid:
    try:
        return grid_from_bytes(Path(path).read_bytes())
    except GridFormatError as e:
        raise GridFormatError(e.reason, f"{path}: {e}") from None


@dataclass(frozen=True, eq=False)
class NetworkOutput:
    """The eight per-pixel outputs, all sharing one ``(rows, cols)`` shape.

    ``S`` is the chargrid (class indices), ``Bc`` the box mask, ``Xc``/``Yc``
    pixel-to-center offsets, ``Wc``/``Hc`` natural-log box sizes and
    ``Xw``/``Yw`` sign-log pixel-to-word-center offsets.
    """

    S: np.ndarray
    Bc: np.ndarray
    Xc: np.ndarray
    Yc: np.ndarray
    Wc: np.ndarray
    Hc: np.ndarray
    Xw: np.ndarray
    Yw: np.ndarray

    def __post_init__(self):
        shape = np.shape(self.S)
        if len(shape) != 2:
            raise ValueError("network output grids must be 2-D")
        for f in fields(self):
            arr = np.asarray(getattr(self, f.name))
            if arr.shape != shape:
                raise ValueError(f"grid {f.name} has shape {arr.shape}, expected {shape}")
            if f.name == "S":
                arr = arr.astype(np.int64, copy=False)
            else:
                arr = arr.astype(np.float64, copy=False)
            if arr is getattr(self, f.name):
                arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, f.name, arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.S.shape

    @classmethod
    def zeros(cls, shape) -> "NetworkOutput":
        return cls(**{name: np.zeros(shape) for name in GRID_NAMES})

    def replace(self, **grids) -> "NetworkOutput":
        current = {name: getattr(self, name) for name in GRID_NAMES}
        current.update(grids)
        return NetworkOutput(**current)

    def to_grids(self) -> dict[str, Grid]:
        return {
            name: Grid(getattr(self, name), CLASS_INDEX if name == "S" else REAL)
            for name in GRID_NAMES
        }

    @classmethod
    def from_grids(cls, grids: dict) -> "NetworkOutput":
        missing = [n for n in GRID_NAMES if n not in grids]
        if missing:
            raise KeyError(f"missing grids: {missing}")
        return cls(**{n: grids[n].values for n in GRID_NAMES})

    def equals(self, other: "NetworkOutput") -> bool:
        return all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n in GRID_NAMES
        )


def output_paths(directory, page_id: str) -> dict[str, Path]:
    directory = Path(directory)
    return {name: directory / f"{page_id}.{name}.cgrd" for name in GRID_NAMES}


def save_output(out: NetworkOutput, directory, page_id: str) -> None:
    paths = output_paths(directory, page_id)
    for name, grid in out.to_grids().items():
        grid_write(grid, paths[name])


def load_output(directory, page_id: str) -> NetworkOutput:
    """Read the eight ``<page_id>.<name>.cgrd`` files; I/O and format errors propagate."""
    grids = {name: grid_read(path) for name, path in output_paths(directory, page_id).items()}
    return NetworkOutput.from_grids(grids)
