"""Durable JSON/CSV formats for instances, assignments, allocations, plans.

Every JSON document carries ``"schema": "offeropt/v1"``.  Numbers round-trip
exactly (floats serialize via repr), key order is fixed, and writers end the
file with a newline, so identical in-memory values produce byte-identical
files.  Readers validate structure and invariants and raise SchemaError with
the offending field named.

Benchmark results use a flat CSV with the header
``n,k,build_ms,solve_ms,total_ms,objective,assigned``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from os import PathLike
from typing import Any, Sequence, Union

from .errors import SchemaError, ValidationError
from .greedy import GreedyTrace
from .model import Assignment, OfferCatalog, OfferType, Subscriber
from .segments import AllocationMatrix, BudgetInstance, SegmentInstance

__all__ = [
    "SCHEMA",
    "BENCH_FIELDS",
    "PipelinePlan",
    "read_instance",
    "write_instance",
    "read_assignment",
    "write_assignment",
    "read_segment_instance",
    "write_segment_instance",
    "read_allocation",
    "write_allocation",
    "read_plan",
    "write_plan",
    "read_manifest",
    "write_manifest",
    "write_trace_csv",
    "write_bench_csv",
]

SCHEMA = "offeropt/v1"
BENCH_FIELDS = ["n", "k", "build_ms", "solve_ms", "total_ms", "objective", "assigned"]

Pathish = Union[str, PathLike]


@dataclass(frozen=True)
class PipelinePlan:
    """Stage-1 allocation plus the per-segment greedy assignments it funded."""

    allocation: AllocationMatrix
    segment_assignments: tuple[tuple[int, Assignment], ...]  # (segment index, assignment)
    combined_expected_acceptances: float
    total_objective: float


def _dump(path: Pathish, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _load(path: Pathish) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def _require(obj: dict, field: str, path: Pathish, where: str = "document"):
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: {where} must be an object, got {type(obj).__name__}")
    if field not in obj:
        raise SchemaError(f"{path}: {where} is missing required field {field!r}")
    return obj[field]


def _check_schema(doc: dict, path: Pathish) -> None:
    version = _require(doc, "schema", path)
    if version != SCHEMA:
        raise SchemaError(f"{path}: schema version {version!r} is not {SCHEMA!r}")


def write_instance(path: Pathish, subscribers: Sequence[Subscriber], catalog: OfferCatalog) -> None:
    doc = {
        "schema": SCHEMA,
        "subscribers": [
            {"id": s.id, "p": s.p, "alpha": s.alpha, "gamma": s.gamma} for s in subscribers
        ],
        "offers": [
            {**({"label": o.label} if o.label is not None else {}), "value": o.value, "count": o.count}
            for o in catalog
        ],
    }
    _dump(path, doc)


def read_instance(path: Pathish) -> tuple[list[Subscriber], OfferCatalog]:
    doc = _load(path)
    _check_schema(doc, path)
    subs_raw = _require(doc, "subscribers", path)
    offers_raw = _require(doc, "offers", path)
    subscribers = []
    for idx, rec in enumerate(subs_raw):
        where = f"subscribers[{idx}]"
        try:
            subscribers.append(
                Subscriber(
                    id=_require(rec, "id", path, where),
                    p=_require(rec, "p", path, where),
                    alpha=_require(rec, "alpha", path, where),
                    gamma=_require(rec, "gamma", path, where),
                )
            )
        except (ValidationError, TypeError) as exc:
            raise SchemaError(f"{path}: {where}: {exc}") from exc
    offers = []
    for idx, rec in enumerate(offers_raw):
        where = f"offers[{idx}]"
        try:
            offers.append(
                OfferType(
                    value=_require(rec, "value", path, where),
                    count=_require(rec, "count", path, where),
                    label=rec.get("label"),
                )
            )
        except (ValidationError, TypeError) as exc:
            raise SchemaError(f"{path}: {where}: {exc}") from exc
    try:
        return subscribers, OfferCatalog(offers)
    except ValidationError as exc:
        raise SchemaError(f"{path}: offers: {exc}") from exc


def write_assignment(path: Pathish, assignment: Assignment) -> None:
    doc = {
        "schema": SCHEMA,
        "pairs": [{"subscriber": i, "offer": j} for i, j in assignment.pairs],
        "objective": assignment.objective,
    }
    _dump(path, doc)


def read_assignment(path: Pathish) -> Assignment:
    doc = _load(path)
    _check_schema(doc, path)
    pairs_raw = _require(doc, "pairs", path)
    objective = _require(doc, "objective", path)
    pairs = []
    for idx, rec in enumerate(pairs_raw):
        where = f"pairs[{idx}]"
        sub = _require(rec, "subscriber", path, where)
        offer = _require(rec, "offer", path, where)
        if not isinstance(sub, int) or not isinstance(offer, int) or sub < 0 or offer < 0:
            raise SchemaError(
                f"{path}: {where}: subscriber and offer must be non-negative integers"
            )
        pairs.append((sub, offer))
    if not isinstance(objective, (int, float)) or not math.isfinite(objective):
        raise SchemaError(f"{path}: objective must be a finite number, got {objective!r}")
    return Assignment(pairs, objective)


def write_segment_instance(
    path: Pathish, instance: Union[SegmentInstance, BudgetInstance]
) -> None:
    if isinstance(instance, SegmentInstance):
        doc = {
            "schema": SCHEMA,
            "mode": "counts",
            "probs": [list(row) for row in instance.probs],
            "row_caps": list(instance.row_caps),
            "col_caps": list(instance.col_caps),
        }
    elif isinstance(instance, BudgetInstance):
        doc = {
            "schema": SCHEMA,
            "mode": "budget",
            "probs": [list(row) for row in instance.probs],
            "values": list(instance.values),
            "row_budgets": list(instance.row_budgets),
            "col_budgets": list(instance.col_budgets),
        }
    else:
        raise ValidationError(f"cannot serialize segment instance of type {type(instance).__name__}")
    _dump(path, doc)


def read_segment_instance(path: Pathish) -> Union[SegmentInstance, BudgetInstance]:
    doc = _load(path)
    _check_schema(doc, path)
    mode = _require(doc, "mode", path)
    probs = _require(doc, "probs", path)
    try:
        if mode == "counts":
            return SegmentInstance(
                probs=probs,
                row_caps=_require(doc, "row_caps", path),
                col_caps=_require(doc, "col_caps", path),
            )
        if mode == "budget":
            return BudgetInstance(
                probs=probs,
                values=_require(doc, "values", path),
                row_budgets=_require(doc, "row_budgets", path),
                col_budgets=_require(doc, "col_budgets", path),
            )
    except ValidationError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    raise SchemaError(f"{path}: mode must be 'counts' or 'budget', got {mode!r}")


def write_allocation(path: Pathish, allocation: AllocationMatrix) -> None:
    doc: dict[str, Any] = {
        "schema": SCHEMA,
        "x": [list(row) for row in allocation.x],
        "objective": allocation.objective,
    }
    if not allocation.complete:
        doc["complete"] = False
    _dump(path, doc)


def read_allocation(path: Pathish) -> AllocationMatrix:
    doc = _load(path)
    _check_schema(doc, path)
    x_raw = _require(doc, "x", path)
    objective = _require(doc, "objective", path)
    if not isinstance(x_raw, list) or not all(isinstance(row, list) for row in x_raw):
        raise SchemaError(f"{path}: x must be a list of rows")
    x = []
    for r, row in enumerate(x_raw):
        out_row = []
        for c, v in enumerate(row):
            if not isinstance(v, int) or v < 0:
                raise SchemaError(f"{path}: x[{r}][{c}] must be a non-negative integer, got {v!r}")
            out_row.append(v)
        x.append(tuple(out_row))
    if not isinstance(objective, (int, float)) or not math.isfinite(objective):
        raise SchemaError(f"{path}: objective must be a finite number, got {objective!r}")
    return AllocationMatrix(tuple(x), float(objective), complete=doc.get("complete", True))


def write_plan(path: Pathish, plan: PipelinePlan) -> None:
    doc = {
        "schema": SCHEMA,
        "allocation": {
            "x": [list(row) for row in plan.allocation.x],
            "objective": plan.allocation.objective,
        },
        "segments": [
            {
                "index": index,
                "pairs": [{"subscriber": i, "offer": j} for i, j in assignment.pairs],
                "objective": assignment.objective,
            }
            for index, assignment in plan.segment_assignments
        ],
        "combined_expected_acceptances": plan.combined_expected_acceptances,
        "total_objective": plan.total_objective,
    }
    _dump(path, doc)


def read_plan(path: Pathish) -> PipelinePlan:
    doc = _load(path)
    _check_schema(doc, path)
    alloc_raw = _require(doc, "allocation", path)
    x = tuple(tuple(int(v) for v in row) for row in _require(alloc_raw, "x", path, "allocation"))
    allocation = AllocationMatrix(x, float(_require(alloc_raw, "objective", path, "allocation")))
    segments = []
    for idx, rec in enumerate(_require(doc, "segments", path)):
        where = f"segments[{idx}]"
        pairs = [
            (_require(p, "subscriber", path, where), _require(p, "offer", path, where))
            for p in _require(rec, "pairs", path, where)
        ]
        segments.append(
            (
                int(_require(rec, "index", path, where)),
                Assignment(pairs, float(_require(rec, "objective", path, where))),
            )
        )
    return PipelinePlan(
        allocation=allocation,
        segment_assignments=tuple(segments),
        combined_expected_acceptances=float(
            _require(doc, "combined_expected_acceptances", path)
        ),
        total_objective=float(_require(doc, "total_objective", path)),
    )


def read_manifest(path: Pathish) -> list[tuple[int, str]]:
    """Pipeline manifest: which instance file belongs to which segment index.

    Format: {"schema": ..., "segments": [{"index": 0, "instance": "seg0.json"}, ...]}
    Paths are interpreted relative to the manifest's directory by the caller.
    """
    doc = _load(path)
    _check_schema(doc, path)
    entries = []
    for idx, rec in enumerate(_require(doc, "segments", path)):
        where = f"segments[{idx}]"
        index = _require(rec, "index", path, where)
        instance = _require(rec, "instance", path, where)
        if not isinstance(index, int) or index < 0:
            raise SchemaError(f"{path}: {where}: index must be a non-negative integer")
        if not isinstance(instance, str):
            raise SchemaError(f"{path}: {where}: instance must be a path string")
        entries.append((index, instance))
    return entries


def write_manifest(path: Pathish, entries: Sequence[tuple[int, str]]) -> None:
    doc = {
        "schema": SCHEMA,
        "segments": [{"index": i, "instance": p} for i, p in entries],
    }
    _dump(path, doc)


def write_trace_csv(path: Pathish, trace: GreedyTrace) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "subscriber", "offer", "revenue"])
        for step, (i, j, revenue) in enumerate(trace.steps):
            writer.writerow([step, i, j, repr(revenue)])


def write_bench_csv(path: Pathish, rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
