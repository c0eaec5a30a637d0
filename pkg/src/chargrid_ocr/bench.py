"""Graphcore+NMS vs brute-force NMS on clean synthetic encodings of growing size."""
from __future__ import annotations

import csv
import statistics
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from .codec import encode_page
from .detect import (
    DEFAULT_TAU,
    DEFAULT_THETA,
    Candidates,
    extract_candidates,
    graphcore_filter,
    nms_bruteforce_indices,
    nms_indices,
)
from .grids import GRID_NAMES, NetworkOutput
from .synth import PageConfig, generate_page, page_seed

# one text line, ~600 candidates: fine enough granularity to land near 10^3
BENCH_TILE = PageConfig(shape=(16, 128))


@dataclass(frozen=True)
class BenchRow:
    target: int
    n_candidates: int
    n_after_graphcore: int
    n_boxes: int
    t_graphcore_nms: float
    t_bruteforce_nms: float
    outputs_equal: bool


def rect_array(cands: Candidates, idx) -> np.ndarray:
    return np.stack([cands.cx[idx], cands.cy[idx], cands.w[idx], cands.h[idx]], axis=1)


def same_rect_set(a: np.ndarray, b: np.ndarray, tol: float = 1e-6) -> bool:
    """Set equality of (n, 4) rect arrays up to ``tol`` per coordinate."""
    if a.shape != b.shape:
        return False
    if len(a) == 0:
        return True
    key = lambda r: np.lexsort(np.round(r[:, ::-1] / (10 * tol)).T)  # noqa: E731
    return bool(np.allclose(a[key(a)], b[key(b)], rtol=0.0, atol=tol))


def stack_outputs(outs) -> NetworkOutput:
    """Concatenate pages top to bottom; offsets are pixel-relative so they stay valid."""
    return NetworkOutput(**{n: np.vstack([getattr(o, n) for o in outs]) for n in GRID_NAMES})


def synth_output(target: int, seed: int, cfg: PageConfig | None = None) -> NetworkOutput:
    """Stack clean encoded pages until the candidate count reaches ``target``.

    Whole pages only: cutting a page could strand a character's center pixel.
    """
    cfg = cfg or BENCH_TILE
    outs, count, k = [], 0, 0
    while count < target:
        page = generate_page(PageConfig(**{**asdict(cfg), "seed": page_seed(seed, k)}))
        out = encode_page(page)
        outs.append(out)
        count += int((out.Bc >= DEFAULT_TAU).sum())
        k += 1
    return stack_outputs(outs)


def _median_time(fn, reps: int):
    times, result = [], None
    for _ in range(reps):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def bench_filtering(sizes, seed: int = 0, reps: int = 5, theta: float = DEFAULT_THETA,
                    cfg: PageConfig | None = None, log=None) -> list[BenchRow]:
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    rows = []
    for target in sizes:
        out = synth_output(target, seed, cfg)
        cands = extract_candidates(out, DEFAULT_TAU)

        def fast():
            filtered = graphcore_filter(cands, out.shape)
            return filtered, nms_indices(filtered, theta)

        t_fast, (filtered, kept_fast) = _median_time(fast, reps)
        t_slow, kept_slow = _median_time(lambda: nms_bruteforce_indices(cands, theta), reps)
        equal = same_rect_set(rect_array(filtered, kept_fast), rect_array(cands, kept_slow))
        row = BenchRow(target, len(cands), len(filtered), len(kept_fast), t_fast, t_slow, equal)
        if log:
            log(row)
        rows.append(row)
    return rows


def scaling_ratios(rows, lo: int, hi: int) -> tuple[float, float]:
    """(brute-force ratio, graphcore+nms ratio) of timings between two targets."""
    by = {r.target: r for r in rows}
    return (
        by[hi].t_bruteforce_nms / by[lo].t_bruteforce_nms,
        by[hi].t_graphcore_nms / by[lo].t_graphcore_nms,
    )


def write_csv(rows, path) -> None:
    names = [f.name for f in fields(BenchRow)]
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(names)
        for r in rows:
            w.writerow([getattr(r, n) for n in names])
