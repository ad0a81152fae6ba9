"""Seeded random instance generation.

Parameters are drawn uniformly from configurable ranges; offer values follow
a geometric ladder (base, base*mult, ...) and the total offer stock covers a
configurable fraction of the population, split as evenly as possible across
types with the remainder going to the lowest indices.

Randomness comes from numpy's Philox bit generator (a named counter-based
PRNG with a fixed bit-stream) rather than any ambient default, so the same
config yields byte-identical instances on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import OfferCatalog, OfferType, Subscriber

__all__ = [
    "GeneratorConfig",
    "generate_instance",
    "generate_arrays",
    "offer_counts",
    "PRNG_NAME",
]

PRNG_NAME = "philox4x64"


def _check_range(name: str, rng: tuple[float, float], lo_min: float, hi_max: float) -> None:
    lo, hi = rng
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValidationError(f"{name} bounds must be finite, got {rng!r}")
    if not lo_min <= lo <= hi <= hi_max:
        raise ValidationError(
            f"{name} must satisfy {lo_min} <= lo <= hi <= {hi_max}, got {rng!r}"
        )


@dataclass(frozen=True)
class GeneratorConfig:
    """Everything that determines a generated instance, seed included.

    Defaults keep offers economically meaningful (values typically below the
    revenue at risk alpha*p) while leaving adversarial regimes reachable by
    widening the ranges.
    """

    n: int
    k: int
    seed: int
    p_range: tuple[float, float] = (10.0, 100.0)
    alpha_range: tuple[float, float] = (0.05, 0.6)
    gamma_range: tuple[float, float] = (0.01, 0.2)
    delta_base: float = 5.0
    delta_multiplier: float = 2.0
    coverage: float = 0.5

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValidationError(f"n must be >= 0, got {self.n}")
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        _check_range("p_range", self.p_range, 0.0, math.inf)
        _check_range("alpha_range", self.alpha_range, 0.0, 1.0)
        _check_range("gamma_range", self.gamma_range, 0.0, math.inf)
        if not (math.isfinite(self.delta_base) and self.delta_base > 0):
            raise ValidationError(f"delta_base must be > 0, got {self.delta_base!r}")
        if not (math.isfinite(self.delta_multiplier) and self.delta_multiplier > 0):
            raise ValidationError(
                f"delta_multiplier must be > 0, got {self.delta_multiplier!r}"
            )
        if not 0 < self.coverage <= 1:
            raise ValidationError(f"coverage must be in (0, 1], got {self.coverage!r}")


def offer_counts(n: int, k: int, coverage: float) -> list[int]:
    """Split round(coverage * n) units as evenly as possible over k types."""
    total = int(coverage * n + 0.5)
    base, extra = divmod(total, k)
    return [base + (1 if j < extra else 0) for j in range(k)]


def generate_arrays(
    config: GeneratorConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, OfferCatalog]:
    """Columnized form of generate_instance, for benchmark-scale n."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(config.seed)))
    p = rng.uniform(*config.p_range, config.n)
    alpha = rng.uniform(*config.alpha_range, config.n)
    gamma = rng.uniform(*config.gamma_range, config.n)
    counts = offer_counts(config.n, config.k, config.coverage)
    offers = [
        OfferType(value=config.delta_base * config.delta_multiplier**j, count=counts[j])
        for j in range(config.k)
    ]
    return p, alpha, gamma, OfferCatalog(offers)


def generate_instance(config: GeneratorConfig) -> tuple[list[Subscriber], OfferCatalog]:
    """Draw an instance; identical configs produce identical instances."""
    p, alpha, gamma, catalog = generate_arrays(config)
    subscribers = [
        Subscriber(i, float(p[i]), float(alpha[i]), float(gamma[i])) for i in range(config.n)
    ]
    return subscribers, catalog
