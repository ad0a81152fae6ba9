"""Command-line interface.

One executable with subcommands covering the whole pipeline:

    gen        write a seeded random instance
    solve      greedy offer assignment for one instance
    segments   stage-1 allocation (counts or budget mode)
    pipeline   stage-1 allocation + per-segment greedy assignment
    verify     check an assignment against its instance
    compare    greedy vs brute-force oracle, single instance or batches
    bench      timing grid over (n, k) cells, CSV output, optional fit

Exit codes: 0 success, 1 verification failure, 2 usage/input error,
3 incomplete search result (branch-and-bound node cap).  Summaries go to
stdout as ``key=value`` tokens; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import math
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import SchemaError, ValidationError
from .generate import GeneratorConfig, generate_arrays, generate_instance
from .greedy import greedy_offer, greedy_offer_with_heapset, verify_assignment
from .heaps import build_from_arrays
from .model import OfferCatalog, OfferType
from .oracle import compare_greedy_vs_oracle
from .segments import SegmentInstance, solve_budget_allocation, solve_count_allocation
from .storage import (
    PipelinePlan,
    read_assignment,
    read_instance,
    read_manifest,
    read_segment_instance,
    write_allocation,
    write_assignment,
    write_bench_csv,
    write_instance,
    write_plan,
    write_trace_csv,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_INCOMPLETE = 3


def _range_arg(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _int_list_arg(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _generator_config(args: argparse.Namespace, n: int, k: int, seed: int) -> GeneratorConfig:
    return GeneratorConfig(
        n=n,
        k=k,
        seed=seed,
        p_range=args.p_range,
        alpha_range=args.alpha_range,
        gamma_range=args.gamma_range,
        delta_base=args.delta_base,
        delta_multiplier=args.delta_mult,
        coverage=args.coverage,
    )


def _add_generator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p-range", type=_range_arg, default=(10.0, 100.0), metavar="LO,HI")
    parser.add_argument("--alpha-range", type=_range_arg, default=(0.05, 0.6), metavar="LO,HI")
    parser.add_argument("--gamma-range", type=_range_arg, default=(0.01, 0.2), metavar="LO,HI")
    parser.add_argument("--delta-base", type=float, default=5.0)
    parser.add_argument("--delta-mult", type=float, default=2.0)
    parser.add_argument("--coverage", type=float, default=0.5)


def cmd_gen(args: argparse.Namespace) -> int:
    config = _generator_config(args, args.n, args.k, args.seed)
    subscribers, catalog = generate_instance(config)
    write_instance(args.out, subscribers, catalog)
    print(
        f"wrote {args.out} n={len(subscribers)} k={catalog.k} "
        f"offers={catalog.total_count} budget={catalog.total_value!r}"
    )
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    subscribers, catalog = read_instance(args.infile)
    t0 = time.perf_counter()
    assignment, trace = greedy_offer(subscribers, catalog, no_harm=args.no_harm)
    wall_ms = (time.perf_counter() - t0) * 1e3
    write_assignment(args.out, assignment)
    if args.trace:
        write_trace_csv(args.trace, trace)
    print(
        f"objective={assignment.objective!r} assigned={trace.assigned_count} "
        f"n={len(subscribers)} wall_ms={wall_ms:.3f}"
    )
    return EXIT_OK


def cmd_segments(args: argparse.Namespace) -> int:
    instance = read_segment_instance(args.infile)
    if isinstance(instance, SegmentInstance):
        allocation = solve_count_allocation(instance)
    else:
        allocation = solve_budget_allocation(instance, node_cap=args.node_cap)
    write_allocation(args.out, allocation)
    print(f"objective={allocation.objective!r} complete={allocation.complete}")
    if not allocation.complete:
        print("node cap reached; result is best-found, not proven optimal", file=sys.stderr)
        return EXIT_INCOMPLETE
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace) -> int:
    instance = read_segment_instance(args.segments)
    if isinstance(instance, SegmentInstance):
        allocation = solve_count_allocation(instance)
    else:
        allocation = solve_budget_allocation(instance, node_cap=args.node_cap)

    entries = read_manifest(args.manifest)
    m = len(allocation.x[0])
    k = len(allocation.x)
    if sorted(index for index, _ in entries) != list(range(m)):
        raise ValidationError(
            f"manifest must cover segment indices 0..{m - 1} exactly once, "
            f"got {sorted(i for i, _ in entries)}"
        )

    base = Path(args.manifest).parent
    segment_assignments = []
    objectives = []
    reference_values = None
    for index, rel_path in sorted(entries):
        subscribers, seg_catalog = read_instance(base / rel_path)
        if seg_catalog.k != k:
            raise ValidationError(
                f"segment {index} declares {seg_catalog.k} offer types, stage 1 has {k}"
            )
        values = seg_catalog.values
        if reference_values is None:
            reference_values = values
        elif values != reference_values:
            raise ValidationError(
                f"segment {index} offer values {values} differ from {reference_values}"
            )
        catalog = OfferCatalog(
            OfferType(value=seg_catalog[i].value, count=allocation.x[i][index], label=seg_catalog[i].label)
            for i in range(k)
        )
        assignment, _ = greedy_offer(subscribers, catalog, no_harm=args.no_harm)
        segment_assignments.append((index, assignment))
        objectives.append(assignment.objective)

    plan = PipelinePlan(
        allocation=allocation,
        segment_assignments=tuple(segment_assignments),
        combined_expected_acceptances=allocation.objective,
        total_objective=math.fsum(objectives),
    )
    write_plan(args.out, plan)
    print(
        f"expected_acceptances={allocation.objective!r} "
        f"total_objective={plan.total_objective!r} segments={m}"
    )
    return EXIT_OK if allocation.complete else EXIT_INCOMPLETE


def cmd_verify(args: argparse.Namespace) -> int:
    subscribers, catalog = read_instance(args.instance)
    assignment = read_assignment(args.assignment)
    report = verify_assignment(assignment, subscribers, catalog)
    for check in report.checks:
        status = "ok" if check.passed else "FAIL"
        detail = f" {check.detail}" if check.detail else ""
        print(f"{check.name}: {status}{detail}")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_compare(args: argparse.Namespace) -> int:
    if args.infile:
        subscribers, catalog = read_instance(args.infile)
        report = compare_greedy_vs_oracle(subscribers, catalog)
        print(
            f"greedy={report.greedy_objective!r} oracle={report.oracle_objective!r} "
            f"ratio={report.ratio!r}"
        )
        return EXIT_OK

    ratios = []
    for trial in range(args.trials):
        config = _generator_config(args, args.n, args.k, args.seed + trial)
        subscribers, catalog = generate_instance(config)
        if args.no_scarcity:
            catalog = OfferCatalog(
                OfferType(value=o.value, count=config.n, label=o.label) for o in catalog
            )
        report = compare_greedy_vs_oracle(subscribers, catalog)
        ratios.append(report.ratio)
    suboptimal = sum(1 for r in ratios if r < 1.0 - 1e-12)
    print(
        f"trials={args.trials} n={args.n} k={args.k} "
        f"min_ratio={min(ratios)!r} mean_ratio={statistics.fmean(ratios)!r} "
        f"max_ratio={max(ratios)!r} suboptimal={suboptimal}"
    )
    return EXIT_OK


def _bench_cell(cell: tuple) -> dict:
    n, k, seed, coverage, find_strategy, repeat = cell
    config = GeneratorConfig(n=n, k=k, seed=seed, coverage=coverage)
    # Tiny throwaway run first so JIT/cache loading never lands in a timing.
    warm_p, warm_a, warm_g, warm_cat = generate_arrays(
        GeneratorConfig(n=16, k=2, seed=0, coverage=coverage)
    )
    hs = build_from_arrays(warm_p, warm_a, warm_g, warm_cat, find_strategy=find_strategy)
    greedy_offer_with_heapset(hs, warm_p, warm_a, warm_cat)

    p, alpha, gamma, catalog = generate_arrays(config)
    build_ms = solve_ms = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        hs = build_from_arrays(p, alpha, gamma, catalog, find_strategy=find_strategy)
        t1 = time.perf_counter()
        assignment, trace = greedy_offer_with_heapset(hs, p, alpha, catalog)
        t2 = time.perf_counter()
        build_ms = min(build_ms, (t1 - t0) * 1e3)
        solve_ms = min(solve_ms, (t2 - t1) * 1e3)
    return {
        "n": n,
        "k": k,
        "build_ms": round(build_ms, 3),
        "solve_ms": round(solve_ms, 3),
        "total_ms": round(build_ms + solve_ms, 3),
        "objective": repr(assignment.objective),
        "assigned": trace.assigned_count,
    }


def cmd_bench(args: argparse.Namespace) -> int:
    if args.repeat < 1:
        raise ValidationError("--repeat must be >= 1")
    find_strategy = "root_heap" if args.root_heap else "scan"
    cells = [
        (n, k, args.seed, args.coverage, find_strategy, args.repeat)
        for n in args.n_list
        for k in args.k_list
    ]
    if args.parallel > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(cell) for cell in cells]
    write_bench_csv(args.out, rows)
    for row in rows:
        print(
            f"n={row['n']} k={row['k']} build_ms={row['build_ms']} "
            f"solve_ms={row['solve_ms']} total_ms={row['total_ms']} "
            f"objective={row['objective']} assigned={row['assigned']}"
        )
    if args.fit:
        if len(args.n_list) < 2:
            raise ValidationError("--fit needs at least two n values")
        for k in args.k_list:
            xs = np.log([row["n"] for row in rows if row["k"] == k])
            ys = np.log([max(row["total_ms"], 1e-6) for row in rows if row["k"] == k])
            exponent = float(np.polyfit(xs, ys, 1)[0])
            print(f"fit k={k} exponent={exponent:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="offeropt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_generator_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="greedy offer assignment")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-harm", action="store_true", help="skip offers worse than the baseline")
    p.add_argument("--trace", help="write the step trace to this CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("segments", help="stage-1 segment allocation")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--node-cap", type=int, default=2_000_000)
    p.set_defaults(func=cmd_segments)

    p = sub.add_parser("pipeline", help="stage-1 allocation, then per-segment assignment")
    p.add_argument("--segments", required=True, help="segment instance JSON")
    p.add_argument("--manifest", required=True, help="segment-index -> instance-file manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--no-harm", action="store_true")
    p.add_argument("--node-cap", type=int, default=2_000_000)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("verify", help="check an assignment against its instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--assignment", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="greedy vs brute-force oracle")
    p.add_argument("--in", dest="infile", help="single instance JSON (omit for batch mode)")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--no-scarcity", action="store_true", help="give every type stock for all n")
    _add_generator_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="timing grid over (n, k) cells")
    p.add_argument("--n-list", type=_int_list_arg, required=True)
    p.add_argument("--k-list", type=_int_list_arg, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--coverage", type=float, default=0.5)
    p.add_argument("--fit", action="store_true", help="least-squares exponent of time vs n per k")
    p.add_argument("--repeat", type=int, default=1, help="repeats per cell; min time is kept")
    p.add_argument("--root-heap", action="store_true", help="use the root-heap find variant")
    p.add_argument("--parallel", type=int, default=1, help="worker processes for cells")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
