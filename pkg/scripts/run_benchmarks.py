#!/usr/bin/env python3
"""Sweep both solvers over a benchmark grid and write the query-count CSV.

Thin wrapper over the `sdhsp bench` plumbing so the sweep can be driven from
a checkout without installing console scripts.  Typical use:

    python3 scripts/run_benchmarks.py --grid "3,2;3,3;5,2;7,2;2,3;2,4" --out bench.csv
    python3 scripts/run_benchmarks.py --grid "3,2,1;3,2,2;2,3,1" --seed 11
"""

import argparse
import csv
import io
import sys

from sdhsp.cli import BENCH_COLUMNS, RunConfig, _bench_rows_modular, _bench_rows_vector, _parse_grid


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="3,2;3,3;5,2;2,3;2,4;3,2,1;3,2,2")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--backend", default="statevector", choices=("statevector", "annihilator"))
    ap.add_argument("--encoding", default="unique")
    ap.add_argument("--generators", default="canonical", choices=("canonical", "scrambled"))
    ap.add_argument("--timings", action="store_true")
    ap.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    args = ap.parse_args()

    mode, salts = ("salted", int(args.encoding.split(":")[1])) if ":" in args.encoding else (args.encoding, 1)
    cfg = RunConfig(
        seed=args.seed,
        backend=args.backend,
        mode=mode,
        salts=salts,
        generator_policy=args.generators,
        timings=args.timings,
    )
    rows = []
    for cell in _parse_grid(args.grid):
        if len(cell) == 2:
            rows.extend(_bench_rows_modular(cell[0], cell[1], cfg))
        else:
            rows.extend(_bench_rows_vector(cell[0], cell[1], cell[2], cfg))

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())

    bad = [row for row in rows if not row["match"]]
    print(f"# {len(rows)} runs, {len(bad)} mismatches", file=sys.stderr)
    for row in bad:
        print(f"#   MISMATCH {row}", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
