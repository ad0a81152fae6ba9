"""Segment-level allocation of offer stock or budget.

Stage one of the pipeline decides how many offers of each type (or how much
budget) every subscriber segment receives, before any individual subscriber
is considered.  Two integer programs, both maximizing expected acceptances
sum(p[i][j] * x[i][j]):

* count mode: row caps K_i (stock per offer type) and column caps M_j
  (slots per segment).  This is a transportation problem; it is solved
  exactly with successive-shortest-path min-cost max-flow over the bipartite
  network source -> type i (cap K_i) -> segment j (cap min(K_i, M_j),
  cost -p[i][j]) -> sink (cap M_j).  Augmentation stops as soon as the
  shortest-path cost turns non-negative: the constraints are inequalities,
  so flow beyond the profitable prefix would only hurt.  Network integrality
  makes the optimum integer with no rounding.

* budget mode: per-type budgets B_i and per-segment budgets W_j with unit
  values v_i.  Heterogeneous v_i break the network structure, so this is
  solved by depth-first branch and bound over the x[i][j], variables ordered
  by probability descending, candidates tried high to low.  The bound at a
  node relaxes the column budgets: each row's remaining budget is spent
  fractionally on its best undecided probability.

Both solvers are deterministic (fixed arc/variable ordering) and pure
functions of their inputs.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError

__all__ = [
    "SegmentInstance",
    "BudgetInstance",
    "AllocationMatrix",
    "solve_count_allocation",
    "solve_budget_allocation",
    "max_affordable_units",
]

INF = float("inf")
BOUND_SLACK = 1e-9  # absorbs float roundoff in relaxation bounds; never prunes an optimum


def _as_prob_matrix(probs) -> tuple[tuple[float, ...], ...]:
    rows = tuple(tuple(float(v) for v in row) for row in probs)
    if not rows or not rows[0]:
        raise ValidationError("probability matrix must be non-empty")
    m = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != m:
            raise ValidationError(f"probability matrix row {r} has length {len(row)}, expected {m}")
        for c, v in enumerate(row):
            if not math.isfinite(v) or not 0.0 <= v <= 1.0:
                raise ValidationError(f"probability at ({r},{c}) must be in [0, 1], got {v!r}")
    return rows


def _as_int_caps(caps, name: str, expected: int) -> tuple[int, ...]:
    out = []
    for c in caps:
        if c != int(c) or int(c) < 0:
            raise ValidationError(f"{name} entries must be non-negative integers, got {c!r}")
        out.append(int(c))
    if len(out) != expected:
        raise ValidationError(f"{name} has length {len(out)}, expected {expected}")
    return tuple(out)


def _as_budgets(vals, name: str, expected: int, positive: bool = False) -> tuple[float, ...]:
    out = []
    for v in vals:
        v = float(v)
        if not math.isfinite(v) or v < 0 or (positive and v <= 0):
            kind = "positive" if positive else "non-negative"
            raise ValidationError(f"{name} entries must be finite and {kind}, got {v!r}")
        out.append(v)
    if len(out) != expected:
        raise ValidationError(f"{name} has length {len(out)}, expected {expected}")
    return tuple(out)


@dataclass(frozen=True)
class SegmentInstance:
    """Count-mode instance: acceptance probabilities with stock/slot caps."""

    probs: tuple[tuple[float, ...], ...]
    row_caps: tuple[int, ...]
    col_caps: tuple[int, ...]

    def __init__(self, probs, row_caps, col_caps) -> None:
        rows = _as_prob_matrix(probs)
        object.__setattr__(self, "probs", rows)
        object.__setattr__(self, "row_caps", _as_int_caps(row_caps, "row_caps", len(rows)))
        object.__setattr__(self, "col_caps", _as_int_caps(col_caps, "col_caps", len(rows[0])))

    @property
    def k(self) -> int:
        return len(self.probs)

    @property
    def m(self) -> int:
        return len(self.probs[0])


@dataclass(frozen=True)
class BudgetInstance:
    """Budget-mode instance: probabilities, unit values, row/column budgets."""

    probs: tuple[tuple[float, ...], ...]
    values: tuple[float, ...]
    row_budgets: tuple[float, ...]
    col_budgets: tuple[float, ...]

    def __init__(self, probs, values, row_budgets, col_budgets) -> None:
        rows = _as_prob_matrix(probs)
        object.__setattr__(self, "probs", rows)
        object.__setattr__(self, "values", _as_budgets(values, "values", len(rows), positive=True))
        object.__setattr__(self, "row_budgets", _as_budgets(row_budgets, "row_budgets", len(rows)))
        object.__setattr__(
            self, "col_budgets", _as_budgets(col_budgets, "col_budgets", len(rows[0]))
        )

    @classmethod
    def from_counts(cls, probs, values, row_caps, col_caps) -> "BudgetInstance":
        """Derive budgets from a count-style cap description.

        Row budgets are v_i * K_i.  A segment cap of M_j offers is converted
        to currency as M_j * max(v): enough to receive M_j units of any
        single type.
        """
        rows = _as_prob_matrix(probs)
        vals = _as_budgets(values, "values", len(rows), positive=True)
        K = _as_int_caps(row_caps, "row_caps", len(rows))
        M = _as_int_caps(col_caps, "col_caps", len(rows[0]))
        vmax = max(vals)
        return cls(
            rows,
            vals,
            [v * c for v, c in zip(vals, K)],
            [vmax * c for c in M],
        )

    @property
    def k(self) -> int:
        return len(self.probs)

    @property
    def m(self) -> int:
        return len(self.probs[0])


@dataclass(frozen=True)
class AllocationMatrix:
    """An integer allocation x[i][j] plus its objective sum(p*x).

    ``complete`` is False only when branch and bound hit its node cap and
    returned the best allocation found so far.
    """

    x: tuple[tuple[int, ...], ...]
    objective: float
    complete: bool = True


def _allocation(x: Sequence[Sequence[int]], probs, complete: bool = True) -> AllocationMatrix:
    objective = math.fsum(
        probs[i][j] * x[i][j] for i in range(len(x)) for j in range(len(x[0]))
    )
    return AllocationMatrix(tuple(tuple(int(v) for v in row) for row in x), objective, complete)


class _FlowNetwork:
    """Residual graph with paired edges; caps mutate as flow is pushed."""

    def __init__(self, n_nodes: int) -> None:
        self.adj: list[list[int]] = [[] for _ in range(n_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list[float] = []

    def add_edge(self, u: int, v: int, cap: int, cost: float) -> int:
        e = len(self.to)
        self.adj[u].append(e)
        self.to.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.adj[v].append(e + 1)
        self.to.append(u)
        self.cap.append(0)
        self.cost.append(-cost)
        return e

    def flow_on(self, e: int) -> int:
        return self.cap[e + 1]


def _bellman_ford_potentials(net: _FlowNetwork, source: int) -> list[float]:
    n = len(net.adj)
    dist = [INF] * n
    dist[source] = 0.0
    for _ in range(n - 1):
        changed = False
        for u in range(n):
            if dist[u] == INF:
                continue
            for e in net.adj[u]:
                if net.cap[e] > 0 and dist[u] + net.cost[e] < dist[net.to[e]]:
                    dist[net.to[e]] = dist[u] + net.cost[e]
                    changed = True
        if not changed:
            break
    return [d if d < INF else 0.0 for d in dist]


def _dijkstra(net: _FlowNetwork, source: int, pi: list[float]) -> tuple[list[float], list[int]]:
    n = len(net.adj)
    dist = [INF] * n
    parent_edge = [-1] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = [False] * n
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for e in net.adj[u]:
            if net.cap[e] <= 0:
                continue
            v = net.to[e]
            nd = d + net.cost[e] + pi[u] - pi[v]
            if nd < dist[v]:
                dist[v] = nd
                parent_edge[v] = e
                heapq.heappush(heap, (nd, v))
    return dist, parent_edge


def solve_count_allocation(instance: SegmentInstance) -> AllocationMatrix:
    """Exactly optimal count-mode allocation via min-cost max-flow.

    Leaves stock unallocated once no augmenting path has negative cost, since
    all constraints are <= and unprofitable flow is never forced.
    """
    k, m = instance.k, instance.m
    source = 0
    sink = 1 + k + m
    net = _FlowNetwork(sink + 1)

    for i in range(k):
        net.add_edge(source, 1 + i, instance.row_caps[i], 0.0)
    cell_edges = []
    for i in range(k):
        row_edges = []
        for j in range(m):
            cap = min(instance.row_caps[i], instance.col_caps[j])
            row_edges.append(net.add_edge(1 + i, 1 + k + j, cap, -instance.probs[i][j]))
        cell_edges.append(row_edges)
    for j in range(m):
        net.add_edge(1 + k + j, sink, instance.col_caps[j], 0.0)

    pi = _bellman_ford_potentials(net, source)
    while True:
        dist, parent_edge = _dijkstra(net, source, pi)
        if dist[sink] == INF:
            break
        true_cost = dist[sink] + pi[sink] - pi[source]
        if true_cost >= 0.0:
            break
        bottleneck = None
        v = sink
        while v != source:
            e = parent_edge[v]
            if bottleneck is None or net.cap[e] < bottleneck:
                bottleneck = net.cap[e]
            v = net.to[e ^ 1]
        v = sink
        while v != source:
            e = parent_edge[v]
            net.cap[e] -= bottleneck
            net.cap[e ^ 1] += bottleneck
            v = net.to[e ^ 1]
        for v in range(len(pi)):
            if dist[v] < INF:
                pi[v] += dist[v]

    x = [[net.flow_on(cell_edges[i][j]) for j in range(m)] for i in range(k)]
    return _allocation(x, instance.probs)


def max_affordable_units(budget: float, value: float) -> int:
    """Largest integer u with u * value <= budget, exact w.r.t. float <=."""
    if value <= 0:
        raise ValidationError(f"value must be > 0, got {value!r}")
    if budget < 0:
        return 0
    u = int(budget // value)
    while (u + 1) * value <= budget:
        u += 1
    while u > 0 and u * value > budget:
        u -= 1
    return u


def solve_budget_allocation(
    instance: BudgetInstance, *, node_cap: int = 2_000_000
) -> AllocationMatrix:
    """Exactly optimal budget-mode allocation via branch and bound.

    Intended for desk-scale instances (k, m up to ~10).  If the search tree
    exceeds ``node_cap`` nodes, the best allocation found so far is returned
    with ``complete=False``.
    """
    k, m = instance.k, instance.m
    probs = instance.probs
    values = instance.values
    B = instance.row_budgets
    W = instance.col_budgets

    order = sorted(
        ((i, j) for i in range(k) for j in range(m)),
        key=lambda ij: (-probs[ij[0]][ij[1]], ij[0], ij[1]),
    )
    n_vars = len(order)

    # suffix_maxp[pos][i]: best probability among row i's undecided cells at
    # order position >= pos; drives the column-relaxed bound.
    suffix_maxp = [[0.0] * k for _ in range(n_vars + 1)]
    for pos in range(n_vars - 1, -1, -1):
        i, j = order[pos]
        row = suffix_maxp[pos + 1][:]
        if probs[i][j] > row[i]:
            row[i] = probs[i][j]
        suffix_maxp[pos] = row

    x = [[0] * m for _ in range(k)]
    row_units = [0] * k
    col_spend = [0.0] * m
    # Row feasibility v_i * units <= B_i reduced to an exact integer bound.
    row_max_units = [max_affordable_units(B[i], values[i]) for i in range(k)]

    best_x = [row[:] for row in x]
    best_obj = 0.0
    nodes = 0
    hit_cap = False

    def bound(pos: int, fixed_obj: float) -> float:
        maxp = suffix_maxp[pos]
        slack = fixed_obj
        for i in range(k):
            if maxp[i] > 0.0:
                remaining = B[i] - values[i] * row_units[i]
                if remaining > 0.0:
                    slack += (remaining / values[i]) * maxp[i]
        return slack + BOUND_SLACK

    def dfs(pos: int, fixed_obj: float) -> None:
        nonlocal best_obj, best_x, nodes, hit_cap
        if hit_cap:
            return
        nodes += 1
        if nodes > node_cap:
            hit_cap = True
            return
        if pos == n_vars:
            if fixed_obj > best_obj:
                best_obj = fixed_obj
                best_x = [row[:] for row in x]
            return
        if bound(pos, fixed_obj) <= best_obj:
            return
        i, j = order[pos]
        v = values[i]
        ub = row_max_units[i] - row_units[i]
        ub = min(ub, max_affordable_units(W[j] - col_spend[j], v))
        saved_col = col_spend[j]
        for units in range(ub, -1, -1):
            x[i][j] = units
            row_units[i] += units
            col_spend[j] = saved_col + v * units
            dfs(pos + 1, fixed_obj + probs[i][j] * units)
            row_units[i] -= units
        x[i][j] = 0
        col_spend[j] = saved_col

    dfs(0, 0.0)
    return _allocation(best_x, probs, complete=not hit_cap)
