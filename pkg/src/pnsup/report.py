"""Render a pipeline report to files: JSON, CSV tables, and figures.

All figures go through the Agg backend so rendering works headless.
``write_report`` is the one-stop entry point used by the CLI; the
individual ``render_*`` helpers exist so callers can regenerate a single
figure.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .net import support_label
from .pipeline import PipelineReport

__all__ = [
    "write_report",
    "render_partition",
    "render_cover_matrix",
    "render_stage_counts",
]

_AUTHORIZED = "#a8dadc"
_FORBIDDEN = "#ffb4a2"
_BORDER = "#e63946"


def render_partition(report: PipelineReport, path: str | Path) -> Path:
    """Draw the reachability graph on a circle, colored by partition class."""
    graph = report.graph
    net = report.net
    n = len(graph.states)
    angles = [2 * math.pi * i / n - math.pi / 2 for i in range(n)]
    xs = [math.cos(a) for a in angles]
    ys = [math.sin(a) for a in angles]

    fig, ax = plt.subplots(figsize=(7, 7))
    for src, t, dst in graph.edges:
        if src == dst:
            continue
        dx, dy = xs[dst] - xs[src], ys[dst] - ys[src]
        ax.annotate(
            "",
            xy=(xs[src] + 0.92 * dx, ys[src] + 0.92 * dy),
            xytext=(xs[src] + 0.08 * dx, ys[src] + 0.08 * dy),
            arrowprops={"arrowstyle": "-|>", "color": "#666666", "lw": 0.8},
        )
        if len(graph.edges) <= 40:
            ax.text(
                xs[src] + 0.5 * dx,
                ys[src] + 0.5 * dy,
                net.transitions[t],
                fontsize=7,
                color="#444444",
                ha="center",
            )

    colors = []
    for i in range(n):
        if i in report.parts.border:
            colors.append(_BORDER)
        elif i in report.parts.forbidden:
            colors.append(_FORBIDDEN)
        else:
            colors.append(_AUTHORIZED)
    sizes = [420 if i == graph.initial_index else 300 for i in range(n)]
    widths = [2.2 if i == graph.initial_index else 0.8 for i in range(n)]
    ax.scatter(xs, ys, s=sizes, c=colors, edgecolors="black", linewidths=widths, zorder=3)

    if n <= 60:
        for i in range(n):
            sup = frozenset(p for p, v in enumerate(graph.states[i]) if v)
            label = support_label(sup, net.places) if sup else "(empty)"
            ax.annotate(
                label,
                (xs[i], ys[i]),
                textcoords="offset points",
                xytext=(0, 14),
                fontsize=8,
                ha="center",
                zorder=4,
            )

    handles = [
        plt.Line2D([], [], marker="o", ls="", mfc=c, mec="black", label=lab)
        for c, lab in (
            (_AUTHORIZED, "authorized"),
            (_FORBIDDEN, "forbidden"),
            (_BORDER, "border"),
        )
    ]
    ax.legend(handles=handles, loc="lower left", fontsize=8)
    ax.set_title("Reachable markings and their partition")
    ax.set_aspect("equal")
    ax.axis("off")
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_cover_matrix(report: PipelineReport, path: str | Path) -> Path:
    """Heatmap of the cover table; selected rows are marked on the axis."""
    table = report.cover_table
    ids = report.net.places
    fig, ax = plt.subplots(
        figsize=(
            max(4.0, 0.6 * len(table.columns) + 2),
            max(3.0, 0.4 * len(table.rows) + 1.5),
        )
    )
    grid = [[1 if cell else 0 for cell in row] for row in table.cells] or [[0]]
    ax.imshow(grid, cmap="Greys", aspect="auto", vmin=0, vmax=1)
    ax.set_xticks(range(len(table.columns)))
    ax.set_xticklabels(
        [support_label(c, ids) for c in table.columns], rotation=60, ha="right", fontsize=7
    )
    selected = set(report.selected_rows)
    ax.set_yticks(range(len(table.rows)))
    ax.set_yticklabels(
        [
            support_label(r, ids) + ("  ✓" if i in selected else "")
            for i, r in enumerate(table.rows)
        ],
        fontsize=8,
    )
    ax.set_xlabel("border markings")
    ax.set_ylabel("candidate over-states")
    ax.set_title("Coverage of border markings (✓ = selected)")
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_stage_counts(report: PipelineReport, path: str | Path) -> Path:
    """Bar chart of how many objects each pipeline stage produced."""
    names = [name for name, _ in report.stage_counts]
    values = [count for _, count in report.stage_counts]
    fig, ax = plt.subplots(figsize=(7, 0.5 * len(names) + 1.5))
    bars = ax.barh(range(len(names)), values, color="#457b9d")
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=9)
    ax.invert_yaxis()
    ax.bar_label(bars, padding=3, fontsize=8)
    ax.set_xlabel("count")
    ax.set_title("Pipeline stage sizes")
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def write_report(report: PipelineReport, out_dir: str | Path) -> list[Path]:
    """Write the JSON report, the CSV tables, and the three figures.

    Returns the written paths in a fixed order.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ids = report.net.places
    written = []

    path = out / "report.json"
    path.write_text(json.dumps(report.to_json(), indent=2) + "\n")
    written.append(path)

    path = out / "cover_table.csv"
    path.write_text(report.cover_table.to_csv(ids))
    written.append(path)

    path = out / "stage_counts.csv"
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stage", "count"])
        writer.writerows(report.stage_counts)
    written.append(path)

    path = out / "constraints.csv"
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stage", "constraint", "inequality"])
        for stage, constraints in (
            ("raw", report.raw_constraints),
            ("selected", report.selected_constraints),
            ("merged", report.merged_constraints),
        ):
            for c in constraints:
                writer.writerow([stage, c.compact(ids), c.inequality(ids)])
    written.append(path)

    written.append(render_partition(report, out / "partition.png"))
    written.append(render_cover_matrix(report, out / "cover_matrix.png"))
    written.append(render_stage_counts(report, out / "stages.png"))
    return written
