"""``chargrid-ocr`` command line: synth, encode, decode, eval, bench.

Exit codes: 0 success, 1 usage error, 2 I/O or format error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .annotations import dump_jsonl, load_jsonl, page_id, read_pages, words_from_json, write_pages
from .charset import Charset, default_charset
from .codec import WidthTable, encode_page
from .detect import DEFAULT_TAU, DEFAULT_THETA
from .grids import GridFormatError, load_output, save_output
from .metrics import evaluate_corpus
from .synth import (
    NoiseConfig,
    PageConfig,
    corpus_metadata,
    corrupt_output,
    generate_corpus,
    load_config,
    page_seed,
)
from .words import decode_page_full

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _map(fn, items, threads: int):
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _charset(args) -> Charset:
    return Charset.load(args.charset) if args.charset else default_charset()


def _dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


def cmd_synth(args) -> int:
    charset = _charset(args)
    cfg = load_config(args.config, PageConfig) if args.config else PageConfig()
    noise = load_config(args.noise, NoiseConfig) if args.noise else None
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    pages = generate_corpus(args.pages, args.seed, cfg, charset)
    write_pages(pages, out_dir / "pages.jsonl")

    def work(item):
        k, page = item
        out = encode_page(page, charset)
        if noise is not None:
            per_page = NoiseConfig(noise.reg_sigma, noise.mask_flip_p, noise.bc_jitter_sigma,
                                   page_seed(noise.seed, k))
            out = corrupt_output(out, per_page, charset)
        save_output(out, out_dir, page.doc_id)

    _map(work, enumerate(pages), args.threads)
    _dump_json(corpus_metadata(args.pages, args.seed, cfg, noise), out_dir / "meta.json")
    return EXIT_OK


def cmd_encode(args) -> int:
    charset = _charset(args)
    widths = None
    if args.widths:
        with open(args.widths, encoding="utf-8") as f:
            widths = WidthTable(json.load(f))
    pages = read_pages(args.pages, charset, widths)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def work(page):
        skipped = []
        save_output(encode_page(page, charset, skipped), out_dir, page.doc_id)
        if skipped:
            print(f"{page.doc_id}: {len(skipped)} character boxes cover no pixel", file=sys.stderr)

    _map(work, pages, args.threads)
    return EXIT_OK


def page_ids(in_dir) -> list[str]:
    return sorted(p.name[: -len(".S.cgrd")] for p in Path(in_dir).glob("*.S.cgrd"))


def run_pipeline_files(in_dir, out_path, tau=DEFAULT_TAU, theta=DEFAULT_THETA, graphcore=True,
                       emit_chars=False, charset=None, threads=1) -> int:
    """Decode every page found in ``in_dir`` and write word JSON-lines to ``out_path``."""
    charset = charset or default_charset()
    ids = page_ids(in_dir)
    if not ids:
        print(f"error: no *.S.cgrd files in {in_dir}", file=sys.stderr)
        return EXIT_IO
    try:
        outputs = _map(lambda pid: load_output(in_dir, pid), ids, threads)
    except FileNotFoundError as e:
        print(f"error: missing file {e.filename}", file=sys.stderr)
        return EXIT_IO
    except (GridFormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO

    results = _map(lambda o: decode_page_full(o, charset, tau, theta, graphcore), outputs, threads)
    records = []
    for pid, res in zip(ids, results):
        boxes = res.chars if emit_chars else None
        records.append({"doc_id": pid, "words": [w.to_json(boxes) for w in res.words]})
        warn = res.report.warnings()
        if warn:
            print(f"{pid}: " + ", ".join(f"{k}={v}" for k, v in sorted(warn.items())), file=sys.stderr)
    dump_jsonl(records, out_path)
    return EXIT_OK


def cmd_decode(args) -> int:
    if not 0 < args.tau < 1 or not 0 < args.theta < 1:
        raise UsageError("--tau and --theta must lie in (0, 1)")
    return run_pipeline_files(
        args.input, args.out, args.tau, args.theta, not args.no_graphcore,
        args.emit_chars, _charset(args), args.threads,
    )


def _words_by_doc(path) -> dict:
    return {page_id(rec, i): words_from_json(rec["words"]) for i, rec in enumerate(load_jsonl(path))}


def cmd_eval(args) -> int:
    report = evaluate_corpus(_words_by_doc(args.pred), _words_by_doc(args.gt), args.ignore_case)
    _dump_json(report.to_json(), args.out)
    if args.per_doc:
        with open(args.per_doc, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["doc_id", "n_matched", "n_unmatched_pred", "n_unmatched_gt", "wrr"])
            for doc_id, m, wrr in report.per_document:
                w.writerow([doc_id, m.n_matched, m.n_unmatched_pred, m.n_unmatched_gt, repr(wrr)])
    print(f"corpus WRR {report.corpus_wrr:.6f} over {len(report.per_document)} documents")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import bench_filtering, write_csv

    try:
        sizes = [int(float(s)) for s in args.sizes.split(",")]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    if sizes != sorted(sizes) or any(s <= 0 for s in sizes):
        raise UsageError("--sizes must be positive and ascending")
    rows = bench_filtering(
        sizes, args.seed, args.reps, args.theta,
        log=lambda r: print(r, file=sys.stderr),
    )
    write_csv(rows, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--charset", default=argparse.SUPPRESS, help="charset JSON file")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    p = _Parser(prog="chargrid-ocr", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", parents=[common], help="generate pages and encoded grids")
    s.add_argument("--pages", type=int, required=True)
    s.add_argument("--config", help="PageConfig JSON")
    s.add_argument("--noise", help="NoiseConfig JSON; corrupts the written grids")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("encode", parents=[common], help="page JSON-lines -> CGRD grids")
    e.add_argument("pages")
    e.add_argument("--out", required=True)
    e.add_argument("--widths", help="JSON object symbol -> relative width")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", parents=[common], help="CGRD grids -> word JSON-lines")
    d.add_argument("input", help="directory of <page_id>.<grid>.cgrd files")
    d.add_argument("--out", required=True)
    d.add_argument("--tau", type=float, default=DEFAULT_TAU)
    d.add_argument("--theta", type=float, default=DEFAULT_THETA)
    d.add_argument("--no-graphcore", action="store_true")
    d.add_argument("--emit-chars", action="store_true")
    d.set_defaults(func=cmd_decode)

    v = sub.add_parser("eval", parents=[common], help="word recognition rate")
    v.add_argument("pred")
    v.add_argument("gt")
    v.add_argument("--out", required=True)
    v.add_argument("--per-doc", metavar="CSV")
    v.add_argument("--ignore-case", action="store_true")
    v.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", parents=[common], help="Graphcore+NMS vs brute-force NMS timing")
    b.add_argument("--sizes", default="1000,10000,100000")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--theta", type=float, default=DEFAULT_THETA)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("charset", None), ("threads", 1), ("seed", 0)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except UsageError as e:
        parser.error(str(e))
    except FileNotFoundError as e:
        print(f"error: missing file {e.filename}", file=sys.stderr)
        return EXIT_IO
    except (GridFormatError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
