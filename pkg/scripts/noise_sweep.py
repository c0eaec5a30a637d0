"""Corpus WRR as regression noise grows.

Each seed draws its own small corpus; the clean encoding is corrupted with
Gaussian noise on every regression grid and decoded again.

    python3 scripts/noise_sweep.py --seeds 20 --pages 5
"""
import argparse
import csv
import sys

import numpy as np

from chargrid_ocr.charset import default_charset
from chargrid_ocr.codec import encode_page
from chargrid_ocr.metrics import evaluate_corpus
from chargrid_ocr.rng import derive_seed
from chargrid_ocr.synth import NoiseConfig, PageConfig, corrupt_output, generate_corpus
from chargrid_ocr.words import decode_page


def corpus_wrr(sigma, seed, n_pages, charset, kind):
    pages = generate_corpus(n_pages, seed, PageConfig(), charset)
    pred = {}
    for k, p in enumerate(pages):
        noise = NoiseConfig(**{kind: sigma, "seed": derive_seed(seed, k, 1)})
        pred[p.doc_id] = decode_page(corrupt_output(encode_page(p, charset), noise, charset), charset)
    return evaluate_corpus(pred, {p.doc_id: list(p.words) for p in pages}).corpus_wrr


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", default="0,0.05,0.1,0.2,0.5")
    ap.add_argument("--kind", default="reg_sigma", choices=["reg_sigma", "mask_flip_p", "bc_jitter_sigma"])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--pages", type=int, default=5)
    args = ap.parse_args()

    charset = default_charset()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow([args.kind, "mean_wrr", "min_wrr", "max_wrr"])
    for level in map(float, args.levels.split(",")):
        vals = [corpus_wrr(level, s, args.pages, charset, args.kind) for s in range(args.seeds)]
        w.writerow([level, f"{np.mean(vals):.4f}", f"{min(vals):.4f}", f"{max(vals):.4f}"])


if __name__ == "__main__":
    main()
