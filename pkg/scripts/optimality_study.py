#!/usr/bin/env python3
"""How far from optimal does the greedy assignment land as offers get scarce?

For several coverage levels (total offers / subscribers), runs a batch of
seeded instances through both the greedy solver and the brute-force oracle
and tabulates the objective ratio.  With ample stock the ratio is exactly 1;
as stock shrinks the greedy result can trail the optimum, which is the
behavior this script quantifies.

    python scripts/optimality_study.py --trials 100 --n 8 --k 3
"""

import argparse
import statistics
import sys

from offeropt import GeneratorConfig, compare_greedy_vs_oracle, generate_instance


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--n", type=int, default=8)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--coverages", default="0.125,0.25,0.5,0.75,1.0", help="comma-separated levels"
    )
    args = parser.parse_args()

    print(f"{'coverage':>9} {'min':>9} {'mean':>9} {'max':>9} {'<1':>6}")
    for coverage in (float(c) for c in args.coverages.split(",")):
        ratios = []
        for trial in range(args.trials):
            config = GeneratorConfig(
                n=args.n, k=args.k, seed=args.seed + trial, coverage=coverage
            )
            subscribers, catalog = generate_instance(config)
            ratios.append(compare_greedy_vs_oracle(subscribers, catalog).ratio)
        below = sum(1 for r in ratios if r < 1.0 - 1e-12)
        print(
            f"{coverage:>9.3f} {min(ratios):>9.6f} {statistics.fmean(ratios):>9.6f} "
            f"{max(ratios):>9.6f} {below:>6d}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
