"""Graphviz DOT export for nets and reachability graphs."""

from __future__ import annotations

from typing import Collection

from .monitor import ControlledNet
from .net import PetriNet, ReachabilityGraph, support_label

__all__ = ["net_to_dot", "graph_to_dot"]


def _quote(name: str) -> str:
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _label(*rows: str) -> str:
    # A multi-line label; the line break must survive quoting unescaped.
    escaped = (r.replace("\\", "\\\\").replace('"', '\\"') for r in rows)
    return '"' + "\\n".join(escaped) + '"'


def net_to_dot(net: PetriNet | ControlledNet) -> str:
    """Render a net as DOT: circles for places, boxes for transitions.

    Monitor places are shaded, uncontrollable transitions drawn solid.
    Accepts a controlled net directly so synthesized monitors appear in
    the same picture as the base net.
    """
    if isinstance(net, ControlledNet):
        base = net.base
        monitors = net.monitors
    else:
        base = net
        monitors = ()

    lines = ["digraph net {", "  rankdir=LR;"]
    for i, pid in enumerate(base.places):
        tokens = base.initial[i]
        label = _label(pid, "*") if tokens else _quote(pid)
        shaded = ' style=filled fillcolor="gray85"' if i in base.monitor_places else ""
        lines.append(f"  {_quote(pid)} [shape=circle label={label}{shaded}];")
    for monitor in monitors:
        dots = "*" * monitor.initial_tokens
        label = _label(monitor.id, dots) if dots else _quote(monitor.id)
        lines.append(
            f"  {_quote(monitor.id)} [shape=circle label={label}"
            ' style=filled fillcolor="gray85"];'
        )
    for t, tid in enumerate(base.transitions):
        solid = "" if base.controllable[t] else ' style=filled fillcolor="black" fontcolor="white"'
        lines.append(f"  {_quote(tid)} [shape=box height=0.3{solid}];")

    for t, tid in enumerate(base.transitions):
        for p, pid in enumerate(base.places):
            if base.pre[p][t]:
                lines.append(f"  {_quote(pid)} -> {_quote(tid)};")
        for p, pid in enumerate(base.places):
            if base.post[p][t]:
                lines.append(f"  {_quote(tid)} -> {_quote(pid)};")
    for monitor in monitors:
        for t, w in enumerate(monitor.flow):
            tid = base.transitions[t]
            tag = "" if abs(w) == 1 else f" [label={_quote(str(abs(w)))}]"
            if w < 0:
                lines.append(f"  {_quote(monitor.id)} -> {_quote(tid)}{tag};")
            elif w > 0:
                lines.append(f"  {_quote(tid)} -> {_quote(monitor.id)}{tag};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dot(
    net: PetriNet,
    graph: ReachabilityGraph,
    *,
    forbidden: Collection[int] = (),
    border: Collection[int] = (),
) -> str:
    """Render a reachability graph; states are labeled by their support.

    The initial state gets a double border.  When a partition is given,
    forbidden states are shaded and border states outlined bold.
    """
    forbidden = set(forbidden)
    border = set(border)
    lines = ["digraph reach {", "  rankdir=LR;", "  node [shape=ellipse];"]
    for i, state in enumerate(graph.states):
        sup = frozenset(p for p, v in enumerate(state) if v)
        label = support_label(sup, net.places) if sup else "(empty)"
        attrs = []
        if i == graph.initial_index:
            attrs.append("peripheries=2")
        if i in border:
            attrs.append('style="filled,bold" fillcolor="gray85"')
        elif i in forbidden:
            attrs.append('style=filled fillcolor="gray85"')
        extra = (" " + " ".join(attrs)) if attrs else ""
        lines.append(f"  s{i} [label={_quote(label)}{extra}];")
    for src, t, dst in graph.edges:
        lines.append(f"  s{src} -> s{dst} [label={_quote(net.transitions[t])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
