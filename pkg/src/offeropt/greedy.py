"""Greedy offer assignment.

Repeatedly hands the single most valuable (subscriber, offer) pair its offer:
build the per-offer priority queues, then loop: take the best root over all
live queues, record the pair, drop that subscriber from every queue, decrement
the offer's stock, and tombstone the queue once the stock hits zero.  The loop
ends when offers or subscribers run out; everyone left keeps the zero offer.

Because each step takes the maximum over a shrinking candidate set, the
recorded revenues are non-increasing.  When every offer type has stock for all
subscribers the result is exactly optimal (each subscriber independently gets
its argmax offer); under scarcity it can be beaten, and the oracle module
measures that gap instead of assuming it away.

By default an offer is assigned even when it is worth less than leaving the
subscriber alone (possible when the offer costs more than the revenue at
risk, delta > alpha * p).  The opt-in ``no_harm`` mode instead drops such
subscribers from the pool without consuming an offer; this is an extension,
not the default behavior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError
from .heaps import HeapSet, build_from_arrays
from .model import (
    Assignment,
    OfferCatalog,
    Subscriber,
    expected_revenue,
    subscriber_arrays,
)

__all__ = [
    "GreedyTrace",
    "VerificationReport",
    "CheckResult",
    "greedy_offer",
    "greedy_offer_with_heapset",
    "verify_assignment",
]

OBJECTIVE_REL_TOL = 1e-9


@dataclass(frozen=True)
class GreedyTrace:
    """Step-by-step record of one greedy run.

    steps: (subscriber_id, offer_index, revenue) in assignment order; the
    revenue column is non-increasing.  remaining_offers: per-type stock left
    after the run.  assigned_count: number of subscribers that got an offer.
    """

    steps: tuple[tuple[int, int, float], ...]
    remaining_offers: tuple[int, ...]
    assigned_count: int


def greedy_offer(
    subscribers: Sequence[Subscriber],
    catalog: OfferCatalog,
    *,
    no_harm: bool = False,
    find_strategy: str = "scan",
) -> tuple[Assignment, GreedyTrace]:
    """Run the greedy assignment loop; returns the assignment and its trace.

    The objective includes the zero-offer baseline of unassigned subscribers.
    Deterministic: ties are broken by (offer index, subscriber id).
    """
    p, alpha, gamma = subscriber_arrays(subscribers)
    hs = build_from_arrays(p, alpha, gamma, catalog, find_strategy=find_strategy)
    return greedy_offer_with_heapset(hs, p, alpha, catalog, no_harm=no_harm)


def greedy_offer_with_heapset(
    hs: HeapSet,
    p: np.ndarray,
    alpha: np.ndarray,
    catalog: OfferCatalog,
    *,
    no_harm: bool = False,
) -> tuple[Assignment, GreedyTrace]:
    """The assignment loop on an already-built HeapSet (consumes it).

    Split out so the benchmark harness can time construction and the loop
    separately; ``greedy_offer`` is the everyday entry point.
    """
    baselines = (1.0 - alpha) * p
    counts = list(catalog.counts)
    budget = sum(counts)
    n = p.shape[0]
    n_left = n

    # Types with no stock at all must never win a selection.
    for j, count in enumerate(counts):
        if count == 0:
            hs.delete_queue(j)

    cap = min(n, budget)
    step_ids = np.empty(cap, dtype=np.int64)
    step_offers = np.empty(cap, dtype=np.int64)
    step_keys = np.empty(cap, dtype=np.float64)
    steps = 0

    find = hs.find_max_of_max
    drop = hs.delete_subscriber
    heap_keys = hs.heap_keys

    while budget > 0 and n_left > 0:
        i, j = find()
        key = heap_keys[j, 0]
        if no_harm and key < baselines[i]:
            # Best available offer already trails i's baseline; offers only
            # dwindle from here, so i can safely keep the zero offer.
            drop(i)
            n_left -= 1
            continue
        step_ids[steps] = i
        step_offers[steps] = j
        step_keys[steps] = key
        steps += 1
        drop(i)
        n_left -= 1
        counts[j] -= 1
        budget -= 1
        if counts[j] == 0:
            hs.delete_queue(j)

    per_sub = baselines.copy()
    per_sub[step_ids[:steps]] = step_keys[:steps]
    objective = float(np.sum(per_sub)) if n > 0 else 0.0

    ids = step_ids[:steps].tolist()
    offers = step_offers[:steps].tolist()
    keys = step_keys[:steps].tolist()
    trace = GreedyTrace(
        steps=tuple(zip(ids, offers, keys)),
        remaining_offers=tuple(counts),
        assigned_count=steps,
    )
    return Assignment(zip(ids, offers), objective), trace


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]
    recomputed_objective: Optional[float]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)


def verify_assignment(
    assignment: Assignment,
    subscribers: Sequence[Subscriber],
    catalog: OfferCatalog,
) -> VerificationReport:
    """Check an assignment against every constraint; report, never raise.

    Covers the three explicit constraint families (binary variables, at most
    one offer per subscriber, per-type stock) plus the implied budget caps
    (per-type spend <= value*stock, total spend <= catalog total), and
    recomputes the objective.
    """
    n = len(subscribers)
    k = catalog.k
    checks: list[CheckResult] = []

    bad_refs = [
        (i, j) for i, j in assignment.pairs if not (0 <= i < n) or not (0 <= j < k)
    ]
    checks.append(
        CheckResult(
            "valid_references",
            not bad_refs,
            "" if not bad_refs else f"out-of-range pairs: {bad_refs[:5]}",
        )
    )

    seen_pairs = set()
    dup_pairs = []
    for pair in assignment.pairs:
        if pair in seen_pairs:
            dup_pairs.append(pair)
        seen_pairs.add(pair)
    checks.append(
        CheckResult(
            "binary_assignment",
            not dup_pairs,
            "" if not dup_pairs else f"duplicated pairs: {dup_pairs[:5]}",
        )
    )

    sub_counts: dict[int, int] = {}
    for i, _ in assignment.pairs:
        sub_counts[i] = sub_counts.get(i, 0) + 1
    multi = sorted(i for i, c in sub_counts.items() if c > 1)
    checks.append(
        CheckResult(
            "one_offer_per_subscriber",
            not multi,
            "" if not multi else f"subscribers with several offers: {multi[:5]}",
        )
    )

    used = [0] * k
    for _, j in assignment.pairs:
        if 0 <= j < k:
            used[j] += 1
    over = [(j, used[j], catalog[j].count) for j in range(k) if used[j] > catalog[j].count]
    checks.append(
        CheckResult(
            "offer_type_counts",
            not over,
            "" if not over else f"(offer, used, stock) over stock: {over[:5]}",
        )
    )

    spend = [catalog[j].value * used[j] for j in range(k)]
    over_budget = [
        (j, spend[j], catalog[j].total_value)
        for j in range(k)
        if spend[j] > catalog[j].total_value
    ]
    checks.append(
        CheckResult(
            "per_type_budget",
            not over_budget,
            "" if not over_budget else f"(offer, spend, budget) over: {over_budget[:5]}",
        )
    )
    total_spend = math.fsum(spend)
    total_budget = math.fsum(catalog[j].total_value for j in range(k))
    checks.append(
        CheckResult(
            "total_budget",
            total_spend <= total_budget,
            "" if total_spend <= total_budget else f"spent {total_spend} of {total_budget}",
        )
    )

    recomputed: Optional[float] = None
    dense_ids = all(sub.id == idx for idx, sub in enumerate(subscribers))
    structurally_sound = not bad_refs and not multi and dense_ids
    if structurally_sound:
        offer_of = {i: j for i, j in assignment.pairs}
        values = catalog.values
        try:
            recomputed = math.fsum(
                expected_revenue(
                    values[offer_of[idx]] if idx in offer_of else 0.0,
                    sub.alpha,
                    sub.gamma,
                    sub.p,
                )
                for idx, sub in enumerate(subscribers)
            )
        except ValidationError as exc:
            checks.append(CheckResult("objective_recomputation", False, str(exc)))
        else:
            diff = abs(assignment.objective - recomputed)
            tol = OBJECTIVE_REL_TOL * max(1.0, abs(recomputed))
            checks.append(
                CheckResult(
                    "objective_recomputation",
                    diff <= tol,
                    "" if diff <= tol else f"stored {assignment.objective!r} vs recomputed {recomputed!r}",
                )
            )
    else:
        detail = (
            "skipped: subscriber ids are not dense 0..n-1"
            if not dense_ids
            else "skipped: assignment structurally invalid"
        )
        checks.append(CheckResult("objective_recomputation", False, detail))

    return VerificationReport(tuple(checks), recomputed)
