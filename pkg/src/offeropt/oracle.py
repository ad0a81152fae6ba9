"""Brute-force reference solvers for validating the fast paths.

Plain exhaustive enumeration, deliberately independent of the priority-queue
and flow machinery: clarity over speed.  Both enumerators refuse search
spaces beyond ~10^7 candidate states so property suites stay fast.

``compare_greedy_vs_oracle`` reports the greedy-to-optimal ratio instead of
asserting it: with ample stock the greedy result is provably optimal, but
when offers are scarce it can fall short, and the honest thing to do is
measure by how much.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import SearchSpaceError
from .greedy import greedy_offer
from .model import Assignment, OfferCatalog, Subscriber, expected_revenue, objective_value
from .segments import AllocationMatrix, SegmentInstance, _allocation

__all__ = [
    "SEARCH_SPACE_CAP",
    "InstanceDigest",
    "ComparisonReport",
    "brute_force_oop",
    "brute_force_segments",
    "compare_greedy_vs_oracle",
]

SEARCH_SPACE_CAP = 10_000_000


@dataclass(frozen=True)
class InstanceDigest:
    """Just enough shape information to identify a compared instance."""

    n: int
    k: int
    counts: tuple[int, ...]


@dataclass(frozen=True)
class ComparisonReport:
    greedy_objective: float
    oracle_objective: float
    ratio: float
    instance_digest: InstanceDigest
    optimal_assignment: Assignment


def brute_force_oop(
    subscribers: Sequence[Subscriber], catalog: OfferCatalog
) -> tuple[Assignment, float]:
    """Enumerate every per-subscriber choice of {no offer, type 1..k}.

    Choices violating per-type stock are discarded.  Among maximizers the
    lexicographically smallest choice vector wins (no-offer sorts first), so
    the result is deterministic.
    """
    n = len(subscribers)
    k = catalog.k
    if (k + 1) ** n > SEARCH_SPACE_CAP:
        raise SearchSpaceError(
            f"(k+1)^n = {(k + 1) ** n} exceeds the enumeration cap {SEARCH_SPACE_CAP}"
        )

    # rev[i][0] is the zero-offer baseline, rev[i][c] the revenue of type c-1.
    values = catalog.values
    rev = [
        [expected_revenue(0.0, s.alpha, s.gamma, s.p)]
        + [expected_revenue(v, s.alpha, s.gamma, s.p) for v in values]
        for s in subscribers
    ]
    remaining = list(catalog.counts)
    choice = [0] * n
    best_choice = choice[:]
    best_total = -math.inf

    def enumerate_from(i: int, total: float) -> None:
        nonlocal best_total, best_choice
        if i == n:
            if total > best_total:
                best_total = total
                best_choice = choice[:]
            return
        row = rev[i]
        for c in range(k + 1):
            if c > 0:
                if remaining[c - 1] == 0:
                    continue
                remaining[c - 1] -= 1
            choice[i] = c
            enumerate_from(i + 1, total + row[c])
            if c > 0:
                remaining[c - 1] += 1
        choice[i] = 0

    enumerate_from(0, 0.0)

    pairs = [(i, c - 1) for i, c in enumerate(best_choice) if c > 0]
    objective = objective_value(Assignment(pairs, 0.0), subscribers, catalog) if n else 0.0
    assignment = Assignment(pairs, objective)
    return assignment, objective


def brute_force_segments(instance: SegmentInstance) -> AllocationMatrix:
    """Enumerate all integer matrices within the row/column caps."""
    k, m = instance.k, instance.m
    space = 1
    for i in range(k):
        for j in range(m):
            space *= min(instance.row_caps[i], instance.col_caps[j]) + 1
            if space > SEARCH_SPACE_CAP:
                raise SearchSpaceError(
                    f"enumeration space exceeds the cap {SEARCH_SPACE_CAP}"
                )

    probs = instance.probs
    x = [[0] * m for _ in range(k)]
    row_left = list(instance.row_caps)
    col_left = list(instance.col_caps)
    best_x = [row[:] for row in x]
    best_total = -math.inf
    cells = [(i, j) for i in range(k) for j in range(m)]

    def enumerate_from(pos: int, total: float) -> None:
        nonlocal best_total, best_x
        if pos == len(cells):
            if total > best_total:
                best_total = total
                best_x = [row[:] for row in x]
            return
        i, j = cells[pos]
        top = min(row_left[i], col_left[j])
        for units in range(top + 1):
            x[i][j] = units
            row_left[i] -= units
            col_left[j] -= units
            enumerate_from(pos + 1, total + probs[i][j] * units)
            row_left[i] += units
            col_left[j] += units
        x[i][j] = 0

    enumerate_from(0, 0.0)
    return _allocation(best_x, probs)


def compare_greedy_vs_oracle(
    subscribers: Sequence[Subscriber], catalog: OfferCatalog
) -> ComparisonReport:
    """Run greedy and the enumerator on the same instance and report.

    The ratio is greedy/oracle, defined as 1 when the oracle objective is 0
    (empty instances).  Ratios below 1 are reported, never raised on.
    """
    greedy_assignment, _ = greedy_offer(subscribers, catalog)
    optimal_assignment, oracle_objective = brute_force_oop(subscribers, catalog)
    greedy_objective = greedy_assignment.objective
    ratio = greedy_objective / oracle_objective if oracle_objective > 0 else 1.0
    digest = InstanceDigest(n=len(subscribers), k=catalog.k, counts=catalog.counts)
    return ComparisonReport(
        greedy_objective=greedy_objective,
        oracle_objective=oracle_objective,
        ratio=ratio,
        instance_digest=digest,
        optimal_assignment=optimal_assignment,
    )
