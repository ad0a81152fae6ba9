#!/usr/bin/env python3
"""Timing grid over large populations.

Runs the greedy solver across n from 100k to 1M and k in {5, 10, 15, 20},
writes one CSV per run, and prints the fitted time-vs-n exponent per k.
Expect near-linear growth (exponent ~1.0-1.2).

    python scripts/reproduce_scaling.py --out scaling.csv
    python scripts/reproduce_scaling.py --quick --out quick.csv
"""

import argparse
import sys

from offeropt.cli import main as cli_main

FULL_N = "100000,200000,300000,400000,500000,600000,700000,800000,900000,1000000"
QUICK_N = "100000,200000,500000,1000000"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="scaling.csv")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--quick", action="store_true", help="4 n-values, k=5 only")
    parser.add_argument("--root-heap", action="store_true")
    args = parser.parse_args()

    argv = [
        "bench",
        "--n-list", QUICK_N if args.quick else FULL_N,
        "--k-list", "5" if args.quick else "5,10,15,20",
        "--seed", str(args.seed),
        "--out", args.out,
        "--fit",
    ]
    if args.root_heap:
        argv.append("--root-heap")
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
