"""Position-tracked max-priority queues for the greedy assigner.

One binary max-heap per offer type, all over the same n subscribers, keyed by
the expected revenue of handing that offer to that subscriber.  Three pieces
make arbitrary deletion cheap:

* ``heap_ids``/``heap_keys``: k array-backed complete binary trees;
* ``pos``: an n x k lookup table mapping subscriber -> position in each
  queue (-1 once absent), so deleting a subscriber from every queue costs
  O(k log n) instead of O(k n);
* ``roots``: the list of queue fronts, scanned to pick the best
  (subscriber, offer) pair in O(k).

Heap order is the strict total order (key desc, subscriber id asc), which
makes every operation deterministic.  Queues are tombstoned rather than
freed so offer-type indices stay stable.

The hot paths are numba kernels over preallocated arrays; the class is a
thin stateful wrapper.  A HeapSet is single-owner mutable state: no
concurrent mutation.
"""

from __future__ import annotations

import heapq
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .errors import ValidationError
from .model import OfferCatalog, Subscriber, revenue_for_offer, subscriber_arrays

__all__ = ["HeapSet", "build", "build_from_arrays"]

NO_POSITION = -1  # sentinel in the lookup table; never exposed


@njit(cache=True, inline="always")
def _entry_gt(key_a: float, id_a: int, key_b: float, id_b: int) -> bool:
    if key_a != key_b:
        return key_a > key_b
    return id_a < id_b


@njit(cache=True)
def _sift_down(heap_ids, heap_keys, pos, j, p, size):
    while True:
        left = 2 * p + 1
        if left >= size:
            break
        best = left
        right = left + 1
        if right < size and _entry_gt(
            heap_keys[j, right], heap_ids[j, right], heap_keys[j, left], heap_ids[j, left]
        ):
            best = right
        if _entry_gt(heap_keys[j, best], heap_ids[j, best], heap_keys[j, p], heap_ids[j, p]):
            heap_ids[j, p], heap_ids[j, best] = heap_ids[j, best], heap_ids[j, p]
            heap_keys[j, p], heap_keys[j, best] = heap_keys[j, best], heap_keys[j, p]
            pos[heap_ids[j, p], j] = p
            pos[heap_ids[j, best], j] = best
            p = best
        else:
            break
    return p


@njit(cache=True)
def _sift_up(heap_ids, heap_keys, pos, j, p):
    while p > 0:
        parent = (p - 1) // 2
        if _entry_gt(heap_keys[j, p], heap_ids[j, p], heap_keys[j, parent], heap_ids[j, parent]):
            heap_ids[j, p], heap_ids[j, parent] = heap_ids[j, parent], heap_ids[j, p]
            heap_keys[j, p], heap_keys[j, parent] = heap_keys[j, parent], heap_keys[j, p]
            pos[heap_ids[j, p], j] = p
            pos[heap_ids[j, parent], j] = parent
            p = parent
        else:
            break
    return p


@njit(cache=True)
def _heapify(heap_ids, heap_keys, pos):
    # Bottom-up construction: linear time per queue.
    k, n = heap_ids.shape
    for j in range(k):
        for p in range(n // 2 - 1, -1, -1):
            _sift_down(heap_ids, heap_keys, pos, j, p, n)


@njit(cache=True)
def _delete_at(heap_ids, heap_keys, pos, sizes, j, p):
    # Swap with the last entry, shrink, then restore heap order at p.
    last = sizes[j] - 1
    if p != last:
        heap_ids[j, p] = heap_ids[j, last]
        heap_keys[j, p] = heap_keys[j, last]
        pos[heap_ids[j, p], j] = p
    sizes[j] = last
    if p < last:
        q = _sift_down(heap_ids, heap_keys, pos, j, p, last)
        if q == p:
            _sift_up(heap_ids, heap_keys, pos, j, p)


@njit(cache=True)
def _delete_subscriber(heap_ids, heap_keys, pos, sizes, alive, i):
    # Validate presence in every live queue before mutating anything.
    k = heap_ids.shape[0]
    for j in range(k):
        if not alive[j]:
            continue
        p = pos[i, j]
        if p < 0 or p >= sizes[j] or heap_ids[j, p] != i:
            return 1
    for j in range(k):
        if alive[j]:
            _delete_at(heap_ids, heap_keys, pos, sizes, j, pos[i, j])
        pos[i, j] = NO_POSITION
    return 0


@njit(cache=True)
def _find_max_of_max(heap_ids, heap_keys, sizes, alive):
    # Scan the queue fronts; strict > keeps the lowest offer index on ties,
    # and within a queue the root already carries the lowest id on key ties.
    best_i = -1
    best_j = -1
    best_key = 0.0
    for j in range(heap_ids.shape[0]):
        if alive[j] and sizes[j] > 0:
            if best_j == -1 or heap_keys[j, 0] > best_key:
                best_j = j
                best_key = heap_keys[j, 0]
                best_i = heap_ids[j, 0]
    return best_i, best_j


class HeapSet:
    """k position-tracked max-queues over one subscriber population.

    ``find_strategy`` selects how the best root is located: ``"scan"`` walks
    the root list (the default), ``"root_heap"`` keeps the roots in a lazily
    invalidated k-entry heap so selection is O(log k); both return identical
    results.
    """

    def __init__(
        self,
        heap_ids: np.ndarray,
        heap_keys: np.ndarray,
        pos: np.ndarray,
        find_strategy: str = "scan",
    ) -> None:
        if find_strategy not in ("scan", "root_heap"):
            raise ValidationError(f"unknown find_strategy {find_strategy!r}")
        self.heap_ids = heap_ids
        self.heap_keys = heap_keys
        self.pos = pos
        self.k, self.n = heap_ids.shape
        self.sizes = np.full(self.k, self.n, dtype=np.int64)
        self.alive = np.ones(self.k, dtype=np.bool_)
        self.removed = np.zeros(self.n, dtype=np.bool_)
        self._root_heap: Optional[list] = None
        if find_strategy == "root_heap":
            self._root_heap = []
            if self.n > 0:
                self._root_heap = [
                    (-float(heap_keys[j, 0]), j, int(heap_ids[j, 0])) for j in range(self.k)
                ]
                heapq.heapify(self._root_heap)

    @property
    def roots(self) -> list[Optional[tuple[int, float]]]:
        """Front (subscriber_id, key) of every queue; None if dead or empty."""
        return [
            (int(self.heap_ids[j, 0]), float(self.heap_keys[j, 0]))
            if self.alive[j] and self.sizes[j] > 0
            else None
            for j in range(self.k)
        ]

    def entries(self, j: int) -> list[tuple[int, float]]:
        """Current (subscriber_id, key) contents of queue j, heap order."""
        return [
            (int(self.heap_ids[j, p]), float(self.heap_keys[j, p]))
            for p in range(int(self.sizes[j]))
        ]

    def is_live(self, j: int) -> bool:
        return bool(self.alive[j])

    def root_key(self, j: int) -> float:
        if not (self.alive[j] and self.sizes[j] > 0):
            raise ValidationError(f"queue {j} is dead or empty")
        return float(self.heap_keys[j, 0])

    def find_max_of_max(self) -> tuple[int, int]:
        """Best (subscriber_id, offer_index) over all live queue fronts.

        Ties go to the lowest offer index, then the lowest subscriber id.
        """
        if self._root_heap is None:
            i, j = _find_max_of_max(self.heap_ids, self.heap_keys, self.sizes, self.alive)
            if j < 0:
                raise ValidationError("all queues are empty or deleted")
            return int(i), int(j)
        heap = self._root_heap
        while heap:
            neg_key, j, i = heap[0]
            if (
                self.alive[j]
                and self.sizes[j] > 0
                and self.heap_ids[j, 0] == i
                and self.heap_keys[j, 0] == -neg_key
            ):
                return i, j
            heapq.heappop(heap)
        raise ValidationError("all queues are empty or deleted")

    def delete_subscriber(self, i: int) -> None:
        """Remove subscriber i from every live queue via the lookup table."""
        if not 0 <= i < self.n:
            raise ValidationError(f"subscriber id {i} out of range")
        if self.removed[i]:
            raise ValidationError(f"subscriber {i} already deleted")
        if self._root_heap is not None:
            # The root cell of queue j changes only when i sat at its front.
            was_front = [
                j for j in range(self.k) if self.alive[j] and self.pos[i, j] == 0
            ]
        status = _delete_subscriber(
            self.heap_ids, self.heap_keys, self.pos, self.sizes, self.alive, i
        )
        if status != 0:
            raise ValidationError(f"subscriber {i} missing from a live queue")
        self.removed[i] = True
        if self._root_heap is not None:
            for j in was_front:
                if self.sizes[j] > 0:
                    heapq.heappush(
                        self._root_heap,
                        (-float(self.heap_keys[j, 0]), j, int(self.heap_ids[j, 0])),
                    )

    def delete_queue(self, j: int) -> None:
        """Tombstone queue j; it never participates in find_max_of_max again."""
        if not 0 <= j < self.k:
            raise ValidationError(f"offer index {j} out of range")
        if not self.alive[j]:
            raise ValidationError(f"queue {j} already deleted")
        self.alive[j] = False


def build_from_arrays(
    p: np.ndarray,
    alpha: np.ndarray,
    gamma: np.ndarray,
    catalog: OfferCatalog,
    *,
    find_strategy: str = "scan",
) -> HeapSet:
    """Build a HeapSet from columnized subscriber parameters."""
    n = p.shape[0]
    k = catalog.k
    heap_keys = np.empty((k, n), dtype=np.float64)
    for j, value in enumerate(catalog.values):
        heap_keys[j] = revenue_for_offer(value, p, alpha, gamma)
    heap_ids = np.tile(np.arange(n, dtype=np.int64), (k, 1))
    pos = np.tile(np.arange(n, dtype=np.int64)[:, None], (1, k))
    _heapify(heap_ids, heap_keys, pos)
    return HeapSet(heap_ids, heap_keys, pos, find_strategy=find_strategy)


def build(
    subscribers: Sequence[Subscriber],
    catalog: OfferCatalog,
    *,
    find_strategy: str = "scan",
) -> HeapSet:
    """Build the k queues, keyed by per-offer expected revenue, plus the
    lookup table."""
    p, alpha, gamma = subscriber_arrays(subscribers)
    return build_from_arrays(p, alpha, gamma, catalog, find_strategy=find_strategy)
