"""End-to-end synthesis: reachability through closed-loop verification.

``run_pipeline`` chains the stages in their canonical order and collects
one report with every intermediate artifact, so the CLI, the renderers,
and the tests all consume the same structure.  Everything in the report
is deterministic except ``timing_seconds``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .constraints import Constraint
from .merge import DEFAULT_SUBSET_CAP, MergeConfig, MergeTrace, merge_fixpoint
from .monitor import (
    AdmissibilityWarning,
    ControlledNet,
    VerificationReport,
    admissibility_check,
    closed_loop_verify,
    synthesize,
    to_matrix,
)
from .net import (
    DEFAULT_STATE_LIMIT,
    PetriNet,
    ReachabilityGraph,
    reach,
    support_label,
)
from .partition import (
    ForbiddenSpec,
    Partition,
    authorized_reachable,
    partition,
    supports_of,
)
from .reduction import (
    DEFAULT_EXACT_THRESHOLD,
    CoverTable,
    marking_constraint,
    minimal_overstates,
    overstate_constraint,
    select_cover,
)

__all__ = ["PipelineConfig", "PipelineReport", "run_pipeline"]


@dataclass(frozen=True)
class PipelineConfig:
    state_limit: int = DEFAULT_STATE_LIMIT
    exact_cover_threshold: int = DEFAULT_EXACT_THRESHOLD
    subset_cap: int = DEFAULT_SUBSET_CAP
    forbid_deadlocks: bool = False
    no_merge: bool = False


@dataclass(frozen=True)
class PipelineReport:
    """Everything the pipeline produced, stage by stage."""

    net: PetriNet
    graph: ReachabilityGraph
    parts: Partition
    raw_constraints: tuple[Constraint, ...]
    candidates: tuple[frozenset[int], ...]
    cover_table: CoverTable
    essential_rows: tuple[int, ...]
    selected_rows: tuple[int, ...]
    cover_method: str
    selected_constraints: tuple[Constraint, ...]
    merged_constraints: tuple[Constraint, ...]
    merge_trace: MergeTrace
    controlled: ControlledNet
    warnings: tuple[AdmissibilityWarning, ...]
    verification: VerificationReport
    timing_seconds: float = field(compare=False)

    @property
    def stage_counts(self) -> tuple[tuple[str, int], ...]:
        return (
            ("reachable states", len(self.graph.states)),
            ("forbidden states", len(self.parts.forbidden)),
            ("border markings", len(self.parts.border)),
            ("raw constraints", len(self.raw_constraints)),
            ("candidate over-states", len(self.candidates)),
            ("selected constraints", len(self.selected_constraints)),
            ("merged constraints", len(self.merged_constraints)),
            ("monitor places", len(self.controlled.monitors)),
        )

    def to_json(self) -> dict:
        ids = self.net.places
        label = lambda s: support_label(s, ids)
        return {
            "net": {
                "places": list(ids),
                "transitions": list(self.net.transitions),
                "uncontrollable": [
                    t for t, c in zip(self.net.transitions, self.net.controllable) if not c
                ],
            },
            "reachability": {
                "states": len(self.graph.states),
                "edges": len(self.graph.edges),
                "deadlocks": sum(
                    1 for i in range(len(self.graph.states)) if not self.graph.successors[i]
                ),
            },
            "partition": {
                "authorized": len(self.parts.authorized),
                "forbidden": len(self.parts.forbidden),
                "border": len(self.parts.border),
                "border_supports": sorted(
                    label(s) for s in supports_of(self.graph, self.parts.border)
                ),
            },
            "raw_constraints": [c.to_json(ids) for c in self.raw_constraints],
            "reduction": {
                "candidates": [label(s) for s in self.candidates],
                "table": self.cover_table.to_json(ids),
                "essential_rows": list(self.essential_rows),
                "selected_rows": list(self.selected_rows),
                "method": self.cover_method,
                "constraints": [c.to_json(ids) for c in self.selected_constraints],
            },
            "merge": {
                "constraints": [c.to_json(ids) for c in self.merged_constraints],
                "steps": self.merge_trace.to_json(ids),
            },
            "monitors": [
                {
                    "id": m.id,
                    "flow": {
                        self.net.transitions[t]: w for t, w in enumerate(m.flow) if w
                    },
                    "initial_tokens": m.initial_tokens,
                    "enforces": m.constraint.compact(ids),
                }
                for m in self.controlled.monitors
            ],
            "admissibility_warnings": [w.to_json() for w in self.warnings],
            "verification": self.verification.to_json(ids),
            "stage_counts": [list(pair) for pair in self.stage_counts],
            "timing_seconds": self.timing_seconds,
        }


def run_pipeline(
    net: PetriNet, spec: ForbiddenSpec, config: PipelineConfig | None = None
) -> PipelineReport:
    """Run the full synthesis chain and return the collected report.

    Raises the stage errors unchanged: :class:`InitialStateForbidden`,
    :class:`Uncoverable`, :class:`InitialViolation`, and the state-limit
    and combinatorial guards.
    """
    config = config or PipelineConfig()
    if config.forbid_deadlocks and not spec.forbid_deadlocks:
        spec = ForbiddenSpec(
            forbidden_markings=spec.forbidden_markings,
            forbidden_constraints=spec.forbidden_constraints,
            forbid_deadlocks=True,
        )
    started = time.perf_counter()

    graph = reach(net, state_limit=config.state_limit)
    parts = partition(net, graph, spec)
    border_supports = supports_of(graph, parts.border)
    authorized_supports = supports_of(graph, parts.authorized)
    other_forbidden = supports_of(graph, parts.forbidden - parts.border)

    raw = tuple(
        marking_constraint(graph.states[i]) for i in sorted(parts.border)
    )

    candidates = tuple(minimal_overstates(border_supports, authorized_supports))
    table = CoverTable.build(candidates, border_supports)
    selection = select_cover(table, exact_threshold=config.exact_cover_threshold)
    selected = tuple(overstate_constraint(candidates[i]) for i in selection.rows)

    if config.no_merge or not selected:
        merged, trace = selected, MergeTrace(steps=())
    else:
        merged, trace = merge_fixpoint(
            selected,
            authorized_supports=authorized_supports,
            border_supports=border_supports,
            other_forbidden_supports=other_forbidden,
            config=MergeConfig(subset_cap=config.subset_cap),
        )

    matrix = to_matrix(merged, net)
    controlled = synthesize(net, matrix)
    warnings = tuple(admissibility_check(controlled))
    expected = supports_of(graph, authorized_reachable(graph, parts.authorized))
    verification = closed_loop_verify(
        controlled, expected, state_limit=config.state_limit
    )

    return PipelineReport(
        net=net,
        graph=graph,
        parts=parts,
        raw_constraints=raw,
        candidates=candidates,
        cover_table=table,
        essential_rows=selection.essential,
        selected_rows=selection.rows,
        cover_method=selection.method,
        selected_constraints=selected,
        merged_constraints=merged,
        merge_trace=trace,
        controlled=controlled,
        warnings=warnings,
        verification=verification,
        timing_seconds=time.perf_counter() - started,
    )
