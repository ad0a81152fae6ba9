import json

import pytest
from hypothesis import given, settings

from offeropt import (
    Assignment,
    BudgetInstance,
    GeneratorConfig,
    OfferCatalog,
    OfferType,
    SchemaError,
    SegmentInstance,
    Subscriber,
    generate_instance,
    greedy_offer,
)
from offeropt.segments import AllocationMatrix
from offeropt.storage import (
    BENCH_FIELDS,
    PipelinePlan,
    read_allocation,
    read_assignment,
    read_instance,
    read_manifest,
    read_plan,
    read_segment_instance,
    write_allocation,
    write_assignment,
    write_bench_csv,
    write_instance,
    write_manifest,
    write_plan,
    write_segment_instance,
    write_trace_csv,
)
from tests.conftest import catalogs, subscriber_lists


def test_instance_round_trip(tmp_path):
    subs = [Subscriber(0, 55.5, 0.25, 0.125), Subscriber(1, 10.0, 0.0, 0.0)]
    catalog = OfferCatalog([OfferType(5.0, 3, label="5GB Data"), OfferType(7.25, 0)])
    path = tmp_path / "inst.json"
    write_instance(path, subs, catalog)
    got_subs, got_catalog = read_instance(path)
    assert got_subs == subs
    assert got_catalog == catalog


@given(subscriber_lists(max_size=8), catalogs())
@settings(max_examples=25)
def test_instance_round_trip_property(tmp_path_factory, subs, catalog):
    path = tmp_path_factory.mktemp("io") / "inst.json"
    write_instance(path, subs, catalog)
    got_subs, got_catalog = read_instance(path)
    assert got_subs == subs
    assert got_catalog == catalog


def test_assignment_round_trip(tmp_path):
    assignment = Assignment([(0, 1), (3, 0)], 123.4567890123)
    path = tmp_path / "asg.json"
    write_assignment(path, assignment)
    assert read_assignment(path) == assignment


def test_solver_documents_round_trip_exactly(tmp_path):
    # generated assignment, segment instance, and allocation all survive
    # write/read with every float bit intact
    from offeropt import solve_count_allocation

    rng_seeds = range(6)
    for seed in rng_seeds:
        subs, catalog = generate_instance(GeneratorConfig(n=17, k=3, seed=seed))
        assignment, _ = greedy_offer(subs, catalog)
        path = tmp_path / f"asg{seed}.json"
        write_assignment(path, assignment)
        assert read_assignment(path) == assignment

        import numpy as np

        shapes = np.random.default_rng(seed)
        instance = SegmentInstance(
            shapes.uniform(0, 1, (2, 3)).tolist(),
            shapes.integers(0, 4, 2).tolist(),
            shapes.integers(0, 4, 3).tolist(),
        )
        seg_path = tmp_path / f"seg{seed}.json"
        write_segment_instance(seg_path, instance)
        assert read_segment_instance(seg_path) == instance

        allocation = solve_count_allocation(instance)
        alloc_path = tmp_path / f"alloc{seed}.json"
        write_allocation(alloc_path, allocation)
        assert read_allocation(alloc_path) == allocation


def test_segment_instance_round_trip_both_modes(tmp_path):
    counts = SegmentInstance([[0.5, 0.25]], [3], [1, 2])
    budget = BudgetInstance([[0.5, 0.25]], [2.0], [6.0], [2.0, 4.0])
    p1, p2 = tmp_path / "counts.json", tmp_path / "budget.json"
    write_segment_instance(p1, counts)
    write_segment_instance(p2, budget)
    assert read_segment_instance(p1) == counts
    assert read_segment_instance(p2) == budget


def test_allocation_round_trip(tmp_path):
    allocation = AllocationMatrix(((2, 0), (1, 3)), 4.25)
    path = tmp_path / "alloc.json"
    write_allocation(path, allocation)
    assert read_allocation(path) == allocation


def test_incomplete_allocation_round_trip(tmp_path):
    allocation = AllocationMatrix(((1,),), 0.5, complete=False)
    path = tmp_path / "alloc.json"
    write_allocation(path, allocation)
    got = read_allocation(path)
    assert got == allocation and not got.complete


def test_plan_round_trip(tmp_path):
    plan = PipelinePlan(
        allocation=AllocationMatrix(((1, 0),), 0.9),
        segment_assignments=((0, Assignment([(0, 0)], 10.0)), (1, Assignment([], 5.0))),
        combined_expected_acceptances=0.9,
        total_objective=15.0,
    )
    path = tmp_path / "plan.json"
    write_plan(path, plan)
    assert read_plan(path) == plan


def test_manifest_round_trip(tmp_path):
    entries = [(0, "seg0.json"), (1, "seg1.json")]
    path = tmp_path / "manifest.json"
    write_manifest(path, entries)
    assert read_manifest(path) == entries


def test_missing_field_is_named(tmp_path):
    path = tmp_path / "bad.json"
    doc = {
        "schema": "offeropt/v1",
        "subscribers": [{"id": 0, "p": 10.0, "gamma": 0.1}],
        "offers": [{"value": 5.0, "count": 1}],
    }
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="alpha"):
        read_instance(path)


def test_out_of_range_alpha_is_schema_error(tmp_path):
    path = tmp_path / "bad.json"
    doc = {
        "schema": "offeropt/v1",
        "subscribers": [{"id": 0, "p": 10.0, "alpha": 1.5, "gamma": 0.1}],
        "offers": [{"value": 5.0, "count": 1}],
    }
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="alpha"):
        read_instance(path)


def test_schema_version_mismatch(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema": "offeropt/v2", "subscribers": [], "offers": []}))
    with pytest.raises(SchemaError, match="offeropt/v2"):
        read_instance(path)


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"schema": "offeropt/v1",\n  "subscribers": [}')
    with pytest.raises(SchemaError, match="line 2"):
        read_instance(path)


def test_segment_mode_required(tmp_path):
    path = tmp_path / "seg.json"
    path.write_text(json.dumps({"schema": "offeropt/v1", "probs": [[0.5]]}))
    with pytest.raises(SchemaError, match="mode"):
        read_segment_instance(path)


def test_writes_are_byte_deterministic(tmp_path):
    subs, catalog = generate_instance(GeneratorConfig(n=20, k=3, seed=5))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    write_instance(a, subs, catalog)
    write_instance(b, subs, catalog)
    assert a.read_bytes() == b.read_bytes()


def test_trace_csv_revenue_column_non_increasing(tmp_path):
    subs, catalog = generate_instance(GeneratorConfig(n=30, k=3, seed=8))
    _, trace = greedy_offer(subs, catalog)
    path = tmp_path / "trace.csv"
    write_trace_csv(path, trace)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "step,subscriber,offer,revenue"
    revenues = [float(line.split(",")[3]) for line in lines[1:]]
    assert all(revenues[t + 1] <= revenues[t] + 1e-9 for t in range(len(revenues) - 1))


def test_bench_csv_header(tmp_path):
    path = tmp_path / "bench.csv"
    write_bench_csv(
        path,
        [
            {
                "n": 10,
                "k": 2,
                "build_ms": 1.0,
                "solve_ms": 2.0,
                "total_ms": 3.0,
                "objective": "1.5",
                "assigned": 5,
            }
        ],
    )
    lines = path.read_text().strip().splitlines()
    assert lines[0] == ",".join(BENCH_FIELDS)
    assert lines[1] == "10,2,1.0,2.0,3.0,1.5,5"
