"""Time Graphcore+NMS against brute-force NMS on stacked synthetic pages.

    python3 scripts/run_benchmark.py --sizes 1000,10000,100000 --out bench.csv
"""
import argparse

from chargrid_ocr.bench import bench_filtering, scaling_ratios, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="bench.csv")
    args = ap.parse_args()

    sizes = [int(float(s)) for s in args.sizes.split(",")]
    rows = bench_filtering(sizes, args.seed, args.reps, log=print)
    write_csv(rows, args.out)
    for lo, hi in zip(sizes, sizes[1:]):
        brute, fast = scaling_ratios(rows, lo, hi)
        print(f"{lo:>7} -> {hi:<7} brute x{brute:6.1f}   graphcore+nms x{fast:5.1f}")


if __name__ == "__main__":
    main()
