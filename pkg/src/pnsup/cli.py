"""Command-line front end.

Commands mirror the pipeline stages (``reach``, ``partition``,
``reduce``, ``merge``, ``synth``, ``verify``, ``pipeline``) plus
``export-dot``.  All commands read JSON documents, write JSON to stdout
or ``--out``, and share three exit codes: 0 for success (with a true
verdict where one is computed), 2 for a false verification verdict, and
1 for any operational error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from .errors import ParseError, PnsupError
from .merge import MergeConfig, merge_fixpoint
from .monitor import (
    admissibility_check,
    closed_loop_verify,
    synthesize,
    to_matrix,
)
from .net import DEFAULT_STATE_LIMIT, PetriNet, reach, support_label
from .netio import (
    MarkingSets,
    load_constraints,
    load_marking_sets,
    load_net,
    load_spec,
    save_controlled,
)
from .partition import ForbiddenSpec, authorized_reachable, partition, supports_of
from .pipeline import PipelineConfig, run_pipeline
from .reduction import (
    DEFAULT_EXACT_THRESHOLD,
    CoverTable,
    marking_constraint,
    minimal_overstates,
    overstate_constraint,
    select_cover,
)
from .dot import graph_to_dot, net_to_dot

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """Argument errors are operational errors: exit 1, not argparse's 2."""

    def error(self, message: str):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _env_state_limit() -> int:
    raw = os.environ.get("PNSUP_STATE_LIMIT")
    if raw is None:
        return DEFAULT_STATE_LIMIT
    try:
        return int(raw)
    except ValueError as exc:
        raise ParseError(f"PNSUP_STATE_LIMIT must be an integer, got {raw!r}") from exc


def _read_json(path: str) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except FileNotFoundError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _emit(doc: object, out: str | None) -> None:
    text = doc if isinstance(doc, str) else json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_pair(args) -> tuple[PetriNet, ForbiddenSpec]:
    net = load_net(_read_json(args.net))
    spec = load_spec(_read_json(args.spec), net)
    return net, spec


def _pipeline_config(args) -> PipelineConfig:
    return PipelineConfig(
        state_limit=args.state_limit,
        exact_cover_threshold=getattr(args, "exact_cover_threshold", DEFAULT_EXACT_THRESHOLD),
        subset_cap=getattr(args, "subset_cap", 10**6),
        forbid_deadlocks=getattr(args, "forbid_deadlocks", False),
        no_merge=getattr(args, "no_merge", False),
    )


def _labels(supports, ids) -> list[str]:
    return [support_label(s, ids) if s else "(empty)" for s in supports]


def _cmd_reach(args) -> int:
    net = load_net(_read_json(args.net))
    graph = reach(net, state_limit=args.state_limit)
    ids = net.places
    doc = {
        "places": list(ids),
        "states": [[ids[p] for p, m in enumerate(s) if m] for s in graph.states],
        "labels": _labels(
            [frozenset(p for p, m in enumerate(s) if m) for s in graph.states], ids
        ),
        "initial": graph.initial_index,
        "edges": [[src, net.transitions[t], dst] for src, t, dst in graph.edges],
        "deadlocks": [
            i for i in range(len(graph.states)) if not graph.successors[i]
        ],
    }
    _emit(doc, args.out)
    return 0


def _cmd_partition(args) -> int:
    net, spec = _load_pair(args)
    if args.forbid_deadlocks:
        spec = ForbiddenSpec(
            forbidden_markings=spec.forbidden_markings,
            forbidden_constraints=spec.forbidden_constraints,
            forbid_deadlocks=True,
        )
    graph = reach(net, state_limit=args.state_limit)
    parts = partition(net, graph, spec)
    ids = net.places
    doc = {
        "counts": {
            "reachable": len(graph.states),
            "authorized": len(parts.authorized),
            "forbidden": len(parts.forbidden),
            "border": len(parts.border),
        },
        "authorized": _labels(supports_of(graph, parts.authorized), ids),
        "forbidden": _labels(supports_of(graph, parts.forbidden), ids),
        "border": _labels(supports_of(graph, parts.border), ids),
    }
    _emit(doc, args.out)
    return 0


def _reduction_inputs(args):
    """Border/authorized supports and (optionally) preset candidates.

    Net mode runs reachability and partitioning; ``--sets`` mode takes
    the supports straight from a marking-sets document.
    """
    if args.sets:
        ms = load_marking_sets(_read_json(args.sets))
        return ms.place_ids, ms, None
    net, spec = _load_pair(args)
    graph = reach(net, state_limit=args.state_limit)
    parts = partition(net, graph, spec)
    ms = MarkingSets(
        place_ids=net.places,
        border_supports=tuple(supports_of(graph, parts.border)),
        authorized_supports=tuple(supports_of(graph, parts.authorized)),
    )
    return net.places, ms, (net, graph, parts)


def _reduce_stage(ids, ms, exact_threshold):
    if ms.authorized_supports is not None:
        candidates = minimal_overstates(ms.border_supports, ms.authorized_supports)
    elif ms.candidates is not None:
        candidates = ms.candidates
    else:
        raise ParseError(
            "reduction needs authorized supports or a preset candidate pool"
        )
    # A preset pool fixes the row order so published tables line up.
    table_rows = ms.candidates if ms.candidates is not None else candidates
    table = CoverTable.build(table_rows, ms.border_supports)
    selection = select_cover(table, exact_threshold=exact_threshold)
    return candidates, table, selection


def _published_comparison(ms: MarkingSets, ids, table: CoverTable, selection) -> dict | None:
    if ms.published_cells is None and ms.published_cover_size is None:
        return None
    doc: dict = {}
    if ms.published_cells is not None:
        diffs = []
        for i, row in enumerate(ms.published_cells):
            for j, cell in enumerate(row):
                derived = int(table.cells[i][j]) if i < len(table.cells) else None
                if derived is not None and derived != cell:
                    diffs.append(
                        {
                            "row": support_label(table.rows[i], ids),
                            "column": support_label(table.columns[j], ids),
                            "published": cell,
                            "derived": derived,
                        }
                    )
        doc["cell_differences"] = diffs
    if ms.published_column_counts is not None:
        doc["column_count_differences"] = [
            {
                "column": support_label(table.columns[j], ids),
                "published": pub,
                "derived": table.column_counts[j],
            }
            for j, pub in enumerate(ms.published_column_counts)
            if pub != table.column_counts[j]
        ]
    if ms.published_cover_size is not None:
        doc["published_cover_size"] = ms.published_cover_size
        doc["derived_cover_size"] = len(selection.rows)
        doc["agrees"] = ms.published_cover_size == len(selection.rows)
    return doc


def _cmd_reduce(args) -> int:
    ids, ms, _ = _reduction_inputs(args)
    candidates, table, selection = _reduce_stage(ids, ms, args.exact_cover_threshold)
    constraints = [overstate_constraint(table.rows[i]) for i in selection.rows]
    doc = {
        "candidates": [support_label(c, ids) for c in candidates],
        "table": table.to_json(ids),
        "selection": {
            "rows": list(selection.rows),
            "essential": list(selection.essential),
            "method": selection.method,
        },
        "constraints": [c.to_json(ids) for c in constraints],
    }
    published = _published_comparison(ms, ids, table, selection)
    if published is not None:
        doc["published"] = published
    if args.csv:
        Path(args.csv).write_text(table.to_csv(ids))
    _emit(doc, args.out)
    return 0


def _cmd_merge(args) -> int:
    ids, ms, _ = _reduction_inputs(args)
    if ms.authorized_supports is None:
        raise ParseError("merging needs authorized supports for its validity checks")
    if args.raw:
        inputs = [
            overstate_constraint(s) for s in ms.border_supports
        ]
    else:
        _, table, selection = _reduce_stage(ids, ms, args.exact_cover_threshold)
        inputs = [overstate_constraint(table.rows[i]) for i in selection.rows]
    merged, trace = merge_fixpoint(
        inputs,
        authorized_supports=ms.authorized_supports,
        border_supports=ms.border_supports,
        config=MergeConfig(subset_cap=args.subset_cap),
    )
    doc = {
        "input_constraints": [c.to_json(ids) for c in inputs],
        "merged_constraints": [c.to_json(ids) for c in merged],
        "trace": trace.to_json(ids),
    }
    _emit(doc, args.out)
    return 0


def _cmd_synth(args) -> int:
    net, spec = _load_pair(args)
    report = run_pipeline(net, spec, _pipeline_config(args))
    matrix = to_matrix(report.merged_constraints, net)
    doc = {
        "constraints": [c.to_json(net.places) for c in report.merged_constraints],
        "matrix": {
            "weights": [list(row) for row in matrix.weights],
            "bounds": list(matrix.bounds),
        },
        "monitors": report.to_json()["monitors"],
        "admissibility_warnings": [w.to_json() for w in report.warnings],
        "controlled_net": save_controlled(report.controlled),
    }
    _emit(doc, args.out)
    return 0


def _cmd_verify(args) -> int:
    net, spec = _load_pair(args)
    if args.constraints:
        constraints = load_constraints(_read_json(args.constraints), net)
        graph = reach(net, state_limit=args.state_limit)
        parts = partition(net, graph, spec)
        matrix = to_matrix(constraints, net)
        controlled = synthesize(net, matrix)
        warnings = admissibility_check(controlled)
        expected = supports_of(graph, authorized_reachable(graph, parts.authorized))
        verification = closed_loop_verify(
            controlled, expected, state_limit=args.state_limit
        )
        doc = {
            "constraints": [c.to_json(net.places) for c in constraints],
            "admissibility_warnings": [w.to_json() for w in warnings],
            "verification": verification.to_json(net.places),
        }
        verdict = verification.maximal_permissive
    else:
        report = run_pipeline(net, spec, _pipeline_config(args))
        doc = {
            "constraints": [c.to_json(net.places) for c in report.merged_constraints],
            "admissibility_warnings": [w.to_json() for w in report.warnings],
            "verification": report.verification.to_json(net.places),
        }
        verdict = report.verification.maximal_permissive
    _emit(doc, args.out)
    return 0 if verdict else 2


def _cmd_pipeline(args) -> int:
    net, spec = _load_pair(args)
    report = run_pipeline(net, spec, _pipeline_config(args))
    if args.report_dir:
        from .report import write_report

        write_report(report, args.report_dir)
    _emit(report.to_json(), args.out)
    return 0 if report.verification.maximal_permissive else 2


def _cmd_export_dot(args) -> int:
    net = load_net(_read_json(args.net))
    if args.graph:
        graph = reach(net, state_limit=args.state_limit)
        if args.spec:
            spec = load_spec(_read_json(args.spec), net)
            parts = partition(net, graph, spec)
            text = graph_to_dot(
                net, graph, forbidden=parts.forbidden, border=parts.border
            )
        else:
            text = graph_to_dot(net, graph)
    else:
        text = net_to_dot(net)
    _emit(text, args.out)
    return 0


def _add_common(sub, *, net=True, spec=True, out=True, limit=True):
    if net:
        sub.add_argument("net", help="net document (JSON)")
    if spec:
        sub.add_argument("spec", help="control specification document (JSON)")
    if out:
        sub.add_argument("--out", help="write output here instead of stdout")
    if limit:
        sub.add_argument(
            "--state-limit",
            type=int,
            default=_env_state_limit(),
            help="abort exploration beyond this many states "
            "(default %(default)s, or PNSUP_STATE_LIMIT)",
        )


def _add_reduction_flags(sub):
    sub.add_argument(
        "--exact-cover-threshold",
        type=int,
        default=DEFAULT_EXACT_THRESHOLD,
        help="limit on 2**rows for exact cover search (default %(default)s)",
    )


def _add_merge_flags(sub):
    sub.add_argument(
        "--subset-cap",
        type=int,
        default=10**6,
        help="largest subset family a single absorption may check (default %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pnsup", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("reach", help="enumerate the reachable markings")
    _add_common(sub, spec=False)
    sub.set_defaults(handler=_cmd_reach)

    sub = commands.add_parser("partition", help="split states into authorized/forbidden/border")
    _add_common(sub)
    sub.add_argument("--forbid-deadlocks", action="store_true")
    sub.set_defaults(handler=_cmd_partition)

    sub = commands.add_parser("reduce", help="candidate over-states, cover table, selection")
    sub.add_argument("net", nargs="?", help="net document (JSON)")
    sub.add_argument("spec", nargs="?", help="control specification document (JSON)")
    sub.add_argument("--sets", help="marking-sets document instead of net+spec")
    sub.add_argument("--csv", help="also write the cover table as CSV here")
    sub.add_argument("--out", help="write output here instead of stdout")
    sub.add_argument("--state-limit", type=int, default=_env_state_limit())
    _add_reduction_flags(sub)
    sub.set_defaults(handler=_cmd_reduce)

    sub = commands.add_parser("merge", help="fold the cover constraints to a fixpoint")
    sub.add_argument("net", nargs="?", help="net document (JSON)")
    sub.add_argument("spec", nargs="?", help="control specification document (JSON)")
    sub.add_argument("--sets", help="marking-sets document instead of net+spec")
    sub.add_argument(
        "--raw",
        action="store_true",
        help="merge the per-border-marking constraints, skipping the cover stage",
    )
    sub.add_argument("--out", help="write output here instead of stdout")
    sub.add_argument("--state-limit", type=int, default=_env_state_limit())
    _add_reduction_flags(sub)
    _add_merge_flags(sub)
    sub.set_defaults(handler=_cmd_merge)

    sub = commands.add_parser("synth", help="synthesize monitor places for the merged constraints")
    _add_common(sub)
    _add_reduction_flags(sub)
    _add_merge_flags(sub)
    sub.add_argument("--forbid-deadlocks", action="store_true")
    sub.add_argument("--no-merge", action="store_true")
    sub.set_defaults(handler=_cmd_synth)

    sub = commands.add_parser("verify", help="closed-loop check against the authorized set")
    _add_common(sub)
    _add_reduction_flags(sub)
    _add_merge_flags(sub)
    sub.add_argument("--forbid-deadlocks", action="store_true")
    sub.add_argument("--no-merge", action="store_true")
    sub.add_argument(
        "--constraints",
        help="audit these constraints (JSON) instead of synthesizing them",
    )
    sub.set_defaults(handler=_cmd_verify)

    sub = commands.add_parser("pipeline", help="run every stage and emit the full report")
    _add_common(sub)
    _add_reduction_flags(sub)
    _add_merge_flags(sub)
    sub.add_argument("--forbid-deadlocks", action="store_true")
    sub.add_argument("--no-merge", action="store_true")
    sub.add_argument(
        "--report-dir",
        help="also render the report (JSON, CSV tables, PNG figures) into this directory",
    )
    sub.set_defaults(handler=_cmd_pipeline)

    sub = commands.add_parser("export-dot", help="Graphviz view of a net or its state graph")
    sub.add_argument("net", help="net document (JSON)")
    sub.add_argument("--graph", action="store_true", help="render the reachability graph")
    sub.add_argument("--spec", help="color the graph by partition (with --graph)")
    sub.add_argument("--out", help="write output here instead of stdout")
    sub.add_argument("--state-limit", type=int, default=_env_state_limit())
    sub.set_defaults(handler=_cmd_export_dot)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    # build_parser stays inside the guard: bad PNSUP_STATE_LIMIT values
    # surface while defaults are evaluated.
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if hasattr(args, "sets") and args.sets is None and not (args.net and args.spec):
            parser.error(f"{args.command} needs either NET SPEC or --sets FILE")
        return args.handler(args)
    except PnsupError as exc:
        error_doc = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(error_doc) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
