"""JSON document formats for nets, specifications, and marking sets.

The native net format lists places (with boolean initial markings),
transitions (with controllability flags), and unit arcs between them.
Controlled nets reuse the same format: monitor places carry ``"monitor":
true``, may start with more than one token, and their arcs may carry a
weight above one.  Only base nets are accepted back by :func:`load_net`,
so a controlled net round-trips exactly when its monitors happen to stay
boolean and unit-weighted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .constraints import Constraint
from .errors import DuplicateId, NonUnitWeight, ParseError, UnknownPlace
from .monitor import ControlledNet
from .net import PetriNet, PlaceSet
from .partition import ForbiddenSpec

__all__ = [
    "load_net",
    "save_net",
    "load_spec",
    "save_spec",
    "load_constraints",
    "save_constraints",
    "save_controlled",
    "MarkingSets",
    "load_marking_sets",
]


def _as_doc(source: str | dict) -> dict:
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(source, dict):
        raise ParseError("document root must be an object")
    return source


def load_net(source: str | dict) -> PetriNet:
    """Parse and validate a net document.

    Checks structure (bipartite unit arcs, boolean initial markings,
    unique identifiers) and raises :class:`ParseError`,
    :class:`DuplicateId`, or :class:`NonUnitWeight` accordingly.
    """
    doc = _as_doc(source)
    places = doc.get("places")
    if not isinstance(places, list) or not places:
        raise ParseError("a net needs a nonempty 'places' list")
    transitions = doc.get("transitions")
    if transitions is None:
        transitions = []
    if not isinstance(transitions, list):
        raise ParseError("'transitions' must be a list")

    seen: set[str] = set()
    place_ids: list[str] = []
    initial: list[int] = []
    monitor: list[str] = []
    for entry in places:
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str) or not entry["id"]:
            raise ParseError(f"bad place entry: {entry!r}")
        pid = entry["id"]
        if pid in seen:
            raise DuplicateId(pid)
        seen.add(pid)
        tokens = entry.get("initial", 0)
        if tokens not in (0, 1):
            raise ParseError(
                f"place {pid!r} has non-boolean initial marking {tokens!r}; "
                "only safe base nets can be loaded"
            )
        if entry.get("monitor", False):
            monitor.append(pid)
        place_ids.append(pid)
        initial.append(int(tokens))

    trans_ids: list[str] = []
    controllable: list[bool] = []
    for entry in transitions:
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str) or not entry["id"]:
            raise ParseError(f"bad transition entry: {entry!r}")
        tid = entry["id"]
        if tid in seen:
            raise DuplicateId(tid)
        seen.add(tid)
        flag = entry.get("controllable", True)
        if not isinstance(flag, bool):
            raise ParseError(f"transition {tid!r} has non-boolean 'controllable'")
        trans_ids.append(tid)
        controllable.append(flag)

    p_idx = {p: i for i, p in enumerate(place_ids)}
    t_idx = {t: i for i, t in enumerate(trans_ids)}
    pre = [[0] * len(trans_ids) for _ in place_ids]
    post = [[0] * len(trans_ids) for _ in place_ids]
    arcs = doc.get("arcs", [])
    if not isinstance(arcs, list):
        raise ParseError("'arcs' must be a list")
    for entry in arcs:
        if not isinstance(entry, dict):
            raise ParseError(f"bad arc entry: {entry!r}")
        src, dst = entry.get("from"), entry.get("to")
        weight = entry.get("weight", 1)
        if weight != 1:
            raise NonUnitWeight(str(src), str(dst), weight)
        if src in p_idx and dst in t_idx:
            matrix, row, col = pre, p_idx[src], t_idx[dst]
        elif src in t_idx and dst in p_idx:
            matrix, row, col = post, p_idx[dst], t_idx[src]
        elif src in p_idx and dst in p_idx or src in t_idx and dst in t_idx:
            raise ParseError(f"arc {src!r} -> {dst!r} must connect a place and a transition")
        else:
            missing = src if src not in p_idx and src not in t_idx else dst
            raise ParseError(f"arc references unknown node {missing!r}")
        if matrix[row][col]:
            raise ParseError(f"duplicate arc {src!r} -> {dst!r}")
        matrix[row][col] = 1

    return PetriNet(
        places=tuple(place_ids),
        transitions=tuple(trans_ids),
        controllable=tuple(controllable),
        pre=tuple(tuple(r) for r in pre),
        post=tuple(tuple(r) for r in post),
        initial=tuple(initial),
        monitor_places=frozenset(p_idx[p] for p in monitor),
    )


def save_net(net: PetriNet) -> dict:
    """Serialize a net to its canonical document form."""
    places = []
    for i, pid in enumerate(net.places):
        entry: dict = {"id": pid, "initial": net.initial[i]}
        if i in net.monitor_places:
            entry["monitor"] = True
        places.append(entry)
    arcs = []
    for t, tid in enumerate(net.transitions):
        for p, pid in enumerate(net.places):
            if net.pre[p][t]:
                arcs.append({"from": pid, "to": tid, "weight": 1})
        for p, pid in enumerate(net.places):
            if net.post[p][t]:
                arcs.append({"from": tid, "to": pid, "weight": 1})
    return {
        "places": places,
        "transitions": [
            {"id": tid, "controllable": net.controllable[t]}
            for t, tid in enumerate(net.transitions)
        ],
        "arcs": arcs,
    }


def save_controlled(controlled: ControlledNet) -> dict:
    """Serialize a controlled net; monitors are flagged and may be non-unit."""
    doc = save_net(controlled.base)
    for monitor in controlled.monitors:
        doc["places"].append(
            {"id": monitor.id, "initial": monitor.initial_tokens, "monitor": True}
        )
        for t, w in enumerate(monitor.flow):
            tid = controlled.base.transitions[t]
            if w < 0:
                doc["arcs"].append({"from": monitor.id, "to": tid, "weight": -w})
            elif w > 0:
                doc["arcs"].append({"from": tid, "to": monitor.id, "weight": w})
    return doc


def _resolve_places(names: object, net: PetriNet, what: str) -> list[int]:
    if not isinstance(names, list) or not names:
        raise ParseError(f"{what} must be a nonempty list of place identifiers")
    out = []
    for name in names:
        idx = net.place_index.get(name)
        if idx is None:
            raise UnknownPlace(name)
        out.append(idx)
    if len(set(out)) != len(out):
        raise ParseError(f"{what} lists a place twice")
    return out


def load_spec(source: str | dict, net: PetriNet) -> ForbiddenSpec:
    """Parse a control specification against a net's place names."""
    doc = _as_doc(source)
    markings = []
    for entry in doc.get("forbidden_markings", []):
        markings.append(frozenset(_resolve_places(entry, net, "forbidden marking")))
    constraints = []
    for entry in doc.get("forbidden_constraints", []):
        if not isinstance(entry, dict):
            raise ParseError(f"bad constraint entry: {entry!r}")
        places = _resolve_places(entry.get("places"), net, "constraint places")
        weights = entry.get("weights", [1] * len(places))
        bound = entry.get("bound")
        if not isinstance(weights, list) or len(weights) != len(places):
            raise ParseError("constraint weights do not match its places")
        if not isinstance(bound, int):
            raise ParseError("constraint bound must be an integer")
        try:
            constraints.append(
                Constraint.from_weights(dict(zip(places, weights)), bound)
            )
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    forbid_deadlocks = doc.get("forbid_deadlocks", False)
    if not isinstance(forbid_deadlocks, bool):
        raise ParseError("'forbid_deadlocks' must be a boolean")
    return ForbiddenSpec(
        forbidden_markings=tuple(markings),
        forbidden_constraints=tuple(constraints),
        forbid_deadlocks=forbid_deadlocks,
    )


def save_spec(spec: ForbiddenSpec, net: PetriNet) -> dict:
    return {
        "forbidden_markings": [
            [net.places[p] for p in sorted(s)] for s in spec.forbidden_markings
        ],
        "forbidden_constraints": [
            {
                "places": [net.places[p] for p, _ in c.terms],
                "weights": [w for _, w in c.terms],
                "bound": c.bound,
            }
            for c in spec.forbidden_constraints
        ],
        "forbid_deadlocks": spec.forbid_deadlocks,
    }


def load_constraints(source: str | dict, net: PetriNet) -> list[Constraint]:
    """Parse a standalone constraint list (same entry shape as in specs)."""
    doc = _as_doc(source)
    entries = doc.get("constraints")
    if not isinstance(entries, list):
        raise ParseError("expected a 'constraints' list")
    out = []
    for entry in entries:
        if not isinstance(entry, dict):
            raise ParseError(f"bad constraint entry: {entry!r}")
        places = _resolve_places(entry.get("places"), net, "constraint places")
        weights = entry.get("weights", [1] * len(places))
        bound = entry.get("bound")
        if not isinstance(weights, list) or len(weights) != len(places):
            raise ParseError("constraint weights do not match its places")
        if not isinstance(bound, int):
            raise ParseError("constraint bound must be an integer")
        try:
            out.append(Constraint.from_weights(dict(zip(places, weights)), bound))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    return out


def save_constraints(constraints: Sequence[Constraint], place_ids: Sequence[str]) -> dict:
    return {"constraints": [c.to_json(place_ids) for c in constraints]}


@dataclass(frozen=True)
class MarkingSets:
    """A net-free bundle of marking supports for the reduction stages.

    Used by fixtures and by the ``--sets`` mode of the CLI to exercise
    separation and merging on tabulated supports when the producing net
    is not available.  ``published_cells``, ``published_column_counts``
    and ``published_cover_size`` carry the coverage tabulation the data
    was transcribed from, so recomputation can be diffed against it.
    """

    place_ids: tuple[str, ...]
    border_supports: tuple[PlaceSet, ...]
    authorized_supports: tuple[PlaceSet, ...] | None = None
    candidates: tuple[PlaceSet, ...] | None = None
    published_cells: tuple[tuple[int, ...], ...] | None = None
    published_column_counts: tuple[int, ...] | None = None
    published_cover_size: int | None = None
    notes: str = ""


def load_marking_sets(source: str | dict) -> MarkingSets:
    doc = _as_doc(source)
    ids = doc.get("places")
    if not isinstance(ids, list) or not ids or len(set(ids)) != len(ids):
        raise ParseError("marking sets need a 'places' list of unique identifiers")
    index = {p: i for i, p in enumerate(ids)}

    def sets_field(name: str, required: bool) -> tuple[PlaceSet, ...] | None:
        raw = doc.get(name)
        if raw is None:
            if required:
                raise ParseError(f"marking sets need '{name}'")
            return None
        if not isinstance(raw, list):
            raise ParseError(f"'{name}' must be a list of place-identifier lists")
        out = []
        for entry in raw:
            if not isinstance(entry, list) or not entry:
                raise ParseError(f"bad support in '{name}': {entry!r}")
            for name_ in entry:
                if name_ not in index:
                    raise UnknownPlace(name_)
            out.append(frozenset(index[n] for n in entry))
        return tuple(out)

    cells = doc.get("published_cells")
    if cells is not None:
        if not isinstance(cells, list) or any(not isinstance(r, list) for r in cells):
            raise ParseError("'published_cells' must be a matrix of 0/1")
        cells = tuple(tuple(int(v) for v in row) for row in cells)
    counts = doc.get("published_column_counts")
    if counts is not None:
        counts = tuple(int(v) for v in counts)

    return MarkingSets(
        place_ids=tuple(ids),
        border_supports=sets_field("border_supports", required=True),
        authorized_supports=sets_field("authorized_supports", required=False),
        candidates=sets_field("candidates", required=False),
        published_cells=cells,
        published_column_counts=counts,
        published_cover_size=doc.get("published_cover_size"),
        notes=doc.get("notes", ""),
    )
