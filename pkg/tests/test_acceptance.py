"""Acceptance checks: one test per shipped guarantee, with time budgets.

Each criterion prints a single ``criterion N: PASS/FAIL`` line (visible
under ``pytest -rA`` or ``-s``) and asserts exact values; tolerances are
integer equality throughout.  The randomized criteria share one cached
batch of pipeline instances whose generation time is charged to
criterion 5's budget.
"""

from __future__ import annotations

from itertools import combinations
from time import perf_counter

from netgen import MAX_PLACES, MAX_STATES, MAX_TRANSITIONS, pipeline_instances
from oracles import (
    brute_minimum_cover_size,
    classify,
    constrained_reach_supports,
    controlled_reach_states,
    subset_cells,
)
from pnsup.cli import _published_comparison
from pnsup.constraints import Constraint
from pnsup.fixtures import border_tabulation, mutex4
from pnsup.merge import merge_fixpoint
from pnsup.monitor import synthesize, to_matrix
from pnsup.net import PetriNet, support_label
from pnsup.partition import authorized_reachable, supports_of
from pnsup.pipeline import run_pipeline
from pnsup.reduction import (
    CoverTable,
    minimal_overstates,
    overstate_constraint,
    select_cover,
)

BATCH_SIZE = 500
BATCH_SEED = 20260816

_batch: list | None = None
_batch_seconds = 0.0


def _instances():
    """The shared random batch; built once, timed for criterion 5."""
    global _batch, _batch_seconds
    if _batch is None:
        started = perf_counter()
        _batch = pipeline_instances(BATCH_SIZE, seed=BATCH_SEED)
        _batch_seconds = perf_counter() - started
    return _batch


def _verdict(n: int, failures: list[str], detail: str) -> None:
    status = "PASS" if not failures else "FAIL"
    print(f"criterion {n}: {status} ({detail})")
    assert not failures, "; ".join(failures[:5])


def _check(failures: list[str], ok: bool, message: str) -> None:
    if not ok:
        failures.append(message)


def test_criterion_1_mutex4_end_to_end():
    started = perf_counter()
    net, spec = mutex4()
    report = run_pipeline(net, spec)
    elapsed = perf_counter() - started

    failures: list[str] = []
    ids = net.places
    merged = [c.compact(ids) for c in report.merged_constraints]
    _check(failures, merged == ["(P2 P4, 1)"], f"merged constraints {merged}")
    _check(failures, len(report.controlled.monitors) == 1, "expected one monitor")
    monitor = report.controlled.monitors[0]
    _check(failures, monitor.flow == (-1, 1, -1, 1), f"monitor flow {monitor.flow}")
    _check(failures, monitor.initial_tokens == 1, f"monitor tokens {monitor.initial_tokens}")

    reached = {support_label(s, ids) for s in report.verification.reached}
    _check(failures, reached == {"P1P3", "P2P3", "P1P4"}, f"closed loop reached {sorted(reached)}")
    authorized = set(supports_of(report.graph, report.parts.authorized))
    _check(failures, set(report.verification.reached) == authorized, "closed loop differs from the authorized set")
    _check(failures, report.verification.maximal_permissive, "verdict not maximally permissive")

    # Exhaustive enumeration: four open-loop states, three closed-loop.
    _check(failures, len(report.graph.states) == 4, f"{len(report.graph.states)} open-loop states")
    _check(failures, report.verification.controlled_states == 3, f"{report.verification.controlled_states} closed-loop states")
    oracle = constrained_reach_supports(net, report.merged_constraints)
    _check(failures, set(report.verification.reached) == oracle, "monitor semantics differ from direct constraint blocking")

    _check(failures, elapsed < 1.0, f"took {elapsed:.2f}s, budget 1s")
    _verdict(1, failures, f"mutex4: 1 constraint, flow (-1,+1,-1,+1), slack 1, 3 closed-loop states, {elapsed:.2f}s")


def test_criterion_2_border_tabulation():
    started = perf_counter()
    ms = border_tabulation()
    ids = ms.place_ids

    failures: list[str] = []
    recomputed = minimal_overstates(ms.border_supports, ms.authorized_supports)
    _check(failures, set(recomputed) == set(ms.candidates), "candidate pool differs from recomputation")

    # Preset row order keeps the table aligned with the reference tabulation.
    table = CoverTable.build(ms.candidates, ms.border_supports)
    oracle_cells = subset_cells(ms.candidates, ms.border_supports)
    _check(
        failures,
        [list(row) for row in table.cells] == oracle_cells,
        "coverage matrix differs from the subset-test oracle",
    )
    first_row = ms.candidates.index(frozenset({1, 3, 5}))
    expected_row = tuple([True] * 4 + [False] * 9)
    _check(
        failures,
        table.cells[first_row] == expected_row,
        f"P2P4P6 covers columns {sorted(table.row_cover(first_row))}",
    )

    selection = select_cover(table)
    best = brute_minimum_cover_size(table.cells, len(table.columns))
    _check(failures, len(selection.rows) == best == 10, f"cover size {len(selection.rows)}, optimum {best}")

    comparison = _published_comparison(ms, ids, table, selection)
    _check(failures, comparison is not None, "no reference comparison produced")
    if comparison is not None:
        _check(
            failures,
            comparison["cell_differences"]
            == [{"row": "P4P6P10", "column": "P2P3P6P8P9", "published": 1, "derived": 0}],
            f"cell differences {comparison['cell_differences']}",
        )
        _check(
            failures,
            comparison["column_count_differences"]
            == [{"column": "P2P3P6P8P9", "published": 2, "derived": 1}],
            f"count differences {comparison['column_count_differences']}",
        )
        _check(
            failures,
            (comparison["published_cover_size"], comparison["derived_cover_size"]) == (9, 10)
            and comparison["agrees"] is False,
            "cover-size discrepancy not logged as 9 vs 10",
        )

    elapsed = perf_counter() - started
    _check(failures, elapsed < 1.0, f"took {elapsed:.2f}s, budget 1s")
    _verdict(2, failures, f"13 borders, 10 candidates, matrix exact, cover-size discrepancy 9 vs 10 logged, {elapsed:.2f}s")


def test_criterion_3_merge_to_single_constraint():
    started = perf_counter()
    ms = border_tabulation()
    evens = frozenset({1, 3, 5, 7, 9})

    # Membership stub for the authorized downward closure: at most two
    # marked places among P2, P4, P6, P8, P10.
    stub = lambda s: len(s & evens) <= 2

    failures: list[str] = []
    _check(failures, stub(frozenset({5, 7})), "stub rejects the P6P8 pair")
    _check(
        failures,
        all(not stub(frozenset(c)) for c in combinations(sorted(evens), 3)),
        "stub admits a triple of even places",
    )

    table = CoverTable.build(ms.candidates, ms.border_supports)
    selection = select_cover(table)
    cover = [overstate_constraint(table.rows[i]) for i in selection.rows]
    merged, _ = merge_fixpoint(cover, oracle=stub, border_supports=ms.border_supports)
    compacts = [c.compact(ms.place_ids) for c in merged]
    _check(
        failures,
        merged == (Constraint.unit(evens, 2),),
        f"{len(cover)} constraints merged to {compacts}",
    )
    _check(
        failures,
        all(len(b & evens) >= 3 for b in ms.border_supports),
        "a border marks fewer than three of the five even places",
    )
    _check(
        failures,
        not any(c.satisfied_by_support(b) for c in merged for b in ms.border_supports),
        "merged constraint admits a border support",
    )

    elapsed = perf_counter() - started
    _check(failures, elapsed < 1.0, f"took {elapsed:.2f}s, budget 1s")
    _verdict(3, failures, f"10 cover constraints merged to {compacts}, all 13 borders violate it, {elapsed:.2f}s")


def test_criterion_4_monitor_matrix_numbers():
    failures: list[str] = []
    constraint = Constraint.unit(frozenset({1, 3, 5, 7, 9}), 2)
    empty = [(f"P{i + 1}", 0) for i in range(10)]
    net = PetriNet.from_arcs(places=empty, transitions=[], arcs=[])

    matrix = to_matrix([constraint], net)
    _check(
        failures,
        matrix.weights == ((0, 1, 0, 1, 0, 1, 0, 1, 0, 1),),
        f"weight row {matrix.weights}",
    )
    _check(failures, matrix.bounds == (2,), f"bounds {matrix.bounds}")

    # Every initial marking with zero weighted tokens yields slack 2.
    for marked in ((), (0, 2, 4, 6, 8), (0,)):
        places = [(f"P{i + 1}", 1 if i in marked else 0) for i in range(10)]
        start = PetriNet.from_arcs(places=places, transitions=[], arcs=[])
        controlled = synthesize(start, to_matrix([constraint], start))
        tokens = controlled.monitors[0].initial_tokens
        _check(failures, tokens == 2, f"marking {marked} gives slack {tokens}")

    _verdict(4, failures, "weight row (0,1,0,1,0,1,0,1,0,1), bound 2, slack 2 at zero-weight markings")


def test_criterion_5_randomized_pipeline_properties():
    instances = _instances()
    started = perf_counter()

    failures: list[str] = []
    clean = 0
    unreachable_authorized = 0
    for index, (net, spec, report) in enumerate(instances):
        graph, parts = report.graph, report.parts
        authorized = supports_of(graph, parts.authorized)
        borders = supports_of(graph, parts.border)
        reachable = supports_of(graph, range(len(graph.states)))
        stages = (
            ("raw", report.raw_constraints),
            ("cover", report.selected_constraints),
            ("merged", report.merged_constraints),
        )
        for stage, constraints in stages:
            if not all(classify(constraints, s) for s in authorized):
                failures.append(f"instance {index}: {stage} set rejects an authorized support")
            if any(classify(constraints, s) for s in borders):
                failures.append(f"instance {index}: {stage} set admits a border support")
        if not all(
            classify(report.selected_constraints, s) == classify(report.merged_constraints, s)
            for s in reachable
        ):
            failures.append(f"instance {index}: cover and merged sets classify a reachable support differently")

        if len(report.controlled.monitors) != len(report.merged_constraints):
            failures.append(f"instance {index}: monitor/constraint count mismatch")
        for base, slack in controlled_reach_states(report.controlled):
            for i, c in enumerate(report.merged_constraints):
                if c.value_on_marking(base) + slack[i] != c.bound:
                    failures.append(f"instance {index}: stacked invariant broken for monitor {i}")
                    break

        expected = set(supports_of(graph, authorized_reachable(graph, parts.authorized)))
        if set(report.verification.reached) != expected:
            failures.append(f"instance {index}: closed loop differs from the reachable authorized set")
        if not report.verification.maximal_permissive:
            failures.append(f"instance {index}: verdict not maximally permissive")
        if constrained_reach_supports(net, report.merged_constraints) != expected:
            failures.append(f"instance {index}: monitors disagree with direct constraint blocking")

        if not report.warnings:
            clean += 1
        if set(authorized) != expected:
            # Authorized states only reachable through forbidden ones; no
            # supervisor confined to authorized states can deliver them.
            unreachable_authorized += 1
        elif set(report.verification.reached) != set(authorized):
            failures.append(f"instance {index}: authorized set reachable but not fully reached")

    elapsed = _batch_seconds + (perf_counter() - started)
    _check(failures, elapsed < 60.0, f"took {elapsed:.1f}s, budget 60s")
    _verdict(
        5,
        failures,
        f"{len(instances)} instances (<= {MAX_PLACES} places, <= {MAX_TRANSITIONS} transitions, "
        f"<= {MAX_STATES} states), {clean} admissibility-clean, "
        f"{unreachable_authorized} with authorized states unreachable under any supervisor, {elapsed:.1f}s",
    )


def test_criterion_6_cover_and_antichain_oracles():
    instances = _instances()
    started = perf_counter()

    failures: list[str] = []
    exact_checked = 0
    tables = [r.cover_table for _, _, r in instances if len(r.candidates) <= 15]
    tables.append(CoverTable.build(border_tabulation().candidates, border_tabulation().border_supports))
    for table in tables:
        best = brute_minimum_cover_size(table.cells, len(table.columns))
        selection = select_cover(table, exact_threshold=1 << 15)
        if best is None or len(selection.rows) != best:
            failures.append(f"cover of size {len(selection.rows)}, optimum {best}")
        exact_checked += 1

    for index, (_, _, report) in enumerate(instances):
        graph, parts = report.graph, report.parts
        authorized = supports_of(graph, parts.authorized)
        borders = supports_of(graph, parts.border)
        candidates = report.candidates
        if any(a < b or b < a for a, b in combinations(candidates, 2)):
            failures.append(f"instance {index}: candidate pool is not an antichain")
        if any(c <= a for c in candidates for a in authorized):
            failures.append(f"instance {index}: a candidate lies inside an authorized support")
        if not all(any(c <= b for c in candidates) for b in borders):
            failures.append(f"instance {index}: a border has no candidate inside it")

    elapsed = perf_counter() - started
    _check(failures, elapsed < 10.0, f"took {elapsed:.1f}s, budget 10s")
    _verdict(
        6,
        failures,
        f"{exact_checked} exact covers match brute force, "
        f"{len(instances)} candidate pools antichain/disjoint/complete, {elapsed:.1f}s",
    )
