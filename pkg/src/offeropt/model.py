"""Churn-aware revenue model for offer campaigns.

A subscriber with monthly top-up ``p`` stays in the network with probability
``1 - alpha``; handing them an incentive worth ``x`` is accepted with
probability ``beta = 1 - exp(-gamma * x)``.  The expected revenue from one
subscriber is then

    f(x) = beta * (p - x) + (1 - beta) * (1 - alpha) * p

which reduces to the no-offer baseline ``(1 - alpha) * p`` at ``x = 0`` and
satisfies the identity ``f(x) - f(0) = beta * (alpha * p - x)``: an offer is
worth making exactly when it costs less than the revenue at risk.

All quantities are plain floats; no currency rounding is applied, and revenue
comparisons downstream use exact float comparison with deterministic
tie-breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "Subscriber",
    "OfferType",
    "OfferCatalog",
    "Assignment",
    "acceptance_probability",
    "expected_revenue",
    "baseline_revenue",
    "objective_value",
]


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Subscriber:
    """Per-subscriber parameters.

    id: dense index of the subscriber (position in the instance list).
    p: monthly top-up, currency units per month.
    alpha: churn probability in [0, 1].
    gamma: acceptance-rate sensitivity, per currency unit.
    """

    id: int
    p: float
    alpha: float
    gamma: float

    def __post_init__(self) -> None:
        if self.id != int(self.id) or int(self.id) < 0:
            raise ValidationError(f"subscriber id must be a non-negative integer, got {self.id!r}")
        p = _check_finite("p", self.p)
        alpha = _check_finite("alpha", self.alpha)
        gamma = _check_finite("gamma", self.gamma)
        if p < 0:
            raise ValidationError(f"p must be >= 0, got {p}")
        if not 0.0 <= alpha <= 1.0:
            raise ValidationError(f"alpha must be in [0, 1], got {alpha}")
        if gamma < 0:
            raise ValidationError(f"gamma must be >= 0, got {gamma}")
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gamma", gamma)


@dataclass(frozen=True)
class OfferType:
    """One offer denomination: value per unit and how many units exist.

    Non-monetary offers (data, SMS, ...) enter as their monetary equivalent,
    with the human-readable name kept in ``label``.
    """

    value: float
    count: int
    label: Optional[str] = None

    def __post_init__(self) -> None:
        value = _check_finite("value", self.value)
        if value <= 0:
            raise ValidationError(f"offer value must be > 0, got {value}")
        if self.count != int(self.count) or int(self.count) < 0:
            raise ValidationError(f"offer count must be a non-negative integer, got {self.count!r}")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "count", int(self.count))

    @property
    def total_value(self) -> float:
        return self.value * self.count


@dataclass(frozen=True)
class OfferCatalog:
    """The k offer types available to a campaign."""

    offers: tuple[OfferType, ...]

    def __init__(self, offers: Iterable[OfferType]) -> None:
        offers = tuple(offers)
        if not offers:
            raise ValidationError("catalog must contain at least one offer type")
        object.__setattr__(self, "offers", offers)

    @property
    def k(self) -> int:
        return len(self.offers)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(o.value for o in self.offers)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(o.count for o in self.offers)

    @property
    def total_count(self) -> int:
        return sum(o.count for o in self.offers)

    @property
    def total_value(self) -> float:
        return sum(o.total_value for o in self.offers)

    def __len__(self) -> int:
        return len(self.offers)

    def __iter__(self):
        return iter(self.offers)

    def __getitem__(self, j: int) -> OfferType:
        return self.offers[j]


@dataclass(frozen=True)
class Assignment:
    """A set of (subscriber_id, offer_type_index) pairs plus the objective.

    Subscribers absent from ``pairs`` implicitly receive the zero offer; their
    baseline revenue is included in ``objective``.
    """

    pairs: tuple[tuple[int, int], ...]
    objective: float

    def __init__(self, pairs: Iterable[tuple[int, int]], objective: float) -> None:
        object.__setattr__(self, "pairs", tuple((int(i), int(j)) for i, j in pairs))
        object.__setattr__(self, "objective", float(objective))

    @property
    def assigned_ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.pairs)


def acceptance_probability(gamma: float, x: float) -> float:
    """Probability that an offer worth ``x`` is accepted: 1 - exp(-gamma * x)."""
    gamma = _check_finite("gamma", gamma)
    x = _check_finite("x", x)
    if gamma < 0:
        raise ValidationError(f"gamma must be >= 0, got {gamma}")
    if x < 0:
        raise ValidationError(f"x must be >= 0, got {x}")
    return -math.expm1(-gamma * x)


def expected_revenue(x: float, alpha: float, gamma: float, p: float) -> float:
    """Expected revenue from one subscriber handed an offer worth ``x``."""
    alpha = _check_finite("alpha", alpha)
    p = _check_finite("p", p)
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must be in [0, 1], got {alpha}")
    if p < 0:
        raise ValidationError(f"p must be >= 0, got {p}")
    beta = acceptance_probability(gamma, x)
    return beta * (p - x) + (1.0 - beta) * (1.0 - alpha) * p


def baseline_revenue(alpha: float, p: float) -> float:
    """Expected revenue at the zero offer: (1 - alpha) * p."""
    return expected_revenue(0.0, alpha, 0.0, p)


def subscriber_arrays(subscribers: Sequence[Subscriber]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Columnize subscribers into (p, alpha, gamma) float64 arrays.

    Requires ids to be the dense range 0..n-1 in list order, which is what
    every array-indexed structure downstream assumes.
    """
    n = len(subscribers)
    p = np.empty(n, dtype=np.float64)
    alpha = np.empty(n, dtype=np.float64)
    gamma = np.empty(n, dtype=np.float64)
    for idx, sub in enumerate(subscribers):
        if sub.id != idx:
            raise ValidationError(
                f"subscriber ids must be dense 0..n-1 in order; position {idx} has id {sub.id}"
            )
        p[idx] = sub.p
        alpha[idx] = sub.alpha
        gamma[idx] = sub.gamma
    return p, alpha, gamma


def revenue_for_offer(delta: float, p: np.ndarray, alpha: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Vectorized expected revenue of one offer value across all subscribers."""
    beta = -np.expm1(-gamma * delta)
    return beta * (p - delta) + (1.0 - beta) * (1.0 - alpha) * p


def objective_value(
    assignment: Assignment,
    subscribers: Sequence[Subscriber],
    catalog: OfferCatalog,
) -> float:
    """Recompute the total expected revenue of an assignment from scratch.

    Assigned subscribers contribute f(delta_j); everyone else contributes the
    zero-offer baseline.  Raises on dangling ids or indices, on a subscriber
    holding more than one offer, and on per-type counts being exceeded.
    """
    n = len(subscribers)
    offer_of: dict[int, int] = {}
    used = [0] * catalog.k
    for i, j in assignment.pairs:
        if not 0 <= i < n:
            raise ValidationError(f"assignment references unknown subscriber id {i}")
        if not 0 <= j < catalog.k:
            raise ValidationError(f"assignment references unknown offer index {j}")
        if i in offer_of:
            raise ValidationError(f"subscriber {i} assigned more than one offer")
        offer_of[i] = j
        used[j] += 1
    for j, cnt in enumerate(used):
        if cnt > catalog[j].count:
            raise ValidationError(
                f"offer type {j} used {cnt} times but only {catalog[j].count} available"
            )
    values = catalog.values
    terms = []
    for idx, sub in enumerate(subscribers):
        if sub.id != idx:
            raise ValidationError(
                f"subscriber ids must be dense 0..n-1 in order; position {idx} has id {sub.id}"
            )
        x = values[offer_of[idx]] if idx in offer_of else 0.0
        terms.append(expected_revenue(x, sub.alpha, sub.gamma, sub.p))
    return math.fsum(terms)
