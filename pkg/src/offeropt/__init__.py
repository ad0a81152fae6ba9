"""Two-stage offer optimization for churn-prone subscriber bases.

Stage 1 (segments): distribute offer stock or budget across subscriber
segments by solving small integer programs exactly.  Stage 2 (subscribers):
assign concrete offers inside each segment with a deterministic greedy loop
over position-tracked priority queues.  Brute-force oracles validate both
stages on small instances, and a benchmark harness checks the scaling shape.
"""

from .errors import SchemaError, SearchSpaceError, ValidationError
from .generate import GeneratorConfig, generate_arrays, generate_instance
from .greedy import (
    GreedyTrace,
    VerificationReport,
    greedy_offer,
    greedy_offer_with_heapset,
    verify_assignment,
)
from .heaps import HeapSet, build, build_from_arrays
from .model import (
    Assignment,
    OfferCatalog,
    OfferType,
    Subscriber,
    acceptance_probability,
    baseline_revenue,
    expected_revenue,
    objective_value,
)
from .oracle import (
    ComparisonReport,
    brute_force_oop,
    brute_force_segments,
    compare_greedy_vs_oracle,
)
from .segments import (
    AllocationMatrix,
    BudgetInstance,
    SegmentInstance,
    solve_budget_allocation,
    solve_count_allocation,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "AllocationMatrix",
    "BudgetInstance",
    "ComparisonReport",
    "GeneratorConfig",
    "GreedyTrace",
    "HeapSet",
    "OfferCatalog",
    "OfferType",
    "SchemaError",
    "SearchSpaceError",
    "SegmentInstance",
    "Subscriber",
    "ValidationError",
    "VerificationReport",
    "acceptance_probability",
    "baseline_revenue",
    "brute_force_oop",
    "brute_force_segments",
    "build",
    "build_from_arrays",
    "compare_greedy_vs_oracle",
    "expected_revenue",
    "generate_arrays",
    "generate_instance",
    "greedy_offer",
    "greedy_offer_with_heapset",
    "objective_value",
    "solve_budget_allocation",
    "solve_count_allocation",
    "verify_assignment",
]
