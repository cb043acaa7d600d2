"""Splitting a reachability graph into authorized, forbidden, and border states.

The forbidden set starts from whatever the specification names directly
(explicit markings, violated constraints, optionally dead markings) and
is then closed backwards along uncontrollable edges: a state that can
slide into the forbidden set without the controller's consent is itself
forbidden.  Border states are the forbidden states a controller can
actually fence off, i.e. those entered from an authorized state by one
controllable firing.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass

from .constraints import Constraint
from .errors import InitialStateForbidden, UnknownPlace
from .net import Marking, PetriNet, PlaceSet, ReachabilityGraph

__all__ = [
    "ForbiddenSpec",
    "Partition",
    "initial_forbidden",
    "uncontrollable_closure",
    "partition",
    "authorized_reachable",
]


@dataclass(frozen=True)
class ForbiddenSpec:
    """What the controller must avoid.

    forbidden_markings lists supports to forbid by exact match,
    forbidden_constraints forbids every state that violates one of the
    inequalities, and forbid_deadlocks adds all dead markings.
    """

    forbidden_markings: tuple[PlaceSet, ...] = ()
    forbidden_constraints: tuple[Constraint, ...] = ()
    forbid_deadlocks: bool = False

    def __post_init__(self) -> None:
        if (
            not self.forbidden_markings
            and not self.forbidden_constraints
            and not self.forbid_deadlocks
        ):
            warnings.warn("specification forbids nothing; the supervisor is vacuous")

    def max_place_index(self) -> int:
        indices = [p for s in self.forbidden_markings for p in s]
        indices += [p for c in self.forbidden_constraints for p in c.support]
        return max(indices, default=-1)


@dataclass(frozen=True)
class Partition:
    """State-index sets relative to one reachability graph.

    border is a subset of forbidden; authorized and forbidden partition
    the full state range.
    """

    authorized: frozenset[int]
    forbidden: frozenset[int]
    border: frozenset[int]


def initial_forbidden(graph: ReachabilityGraph, spec: ForbiddenSpec) -> frozenset[int]:
    """States the specification forbids directly, before closure."""
    n_places = len(graph.states[0]) if graph.states else 0
    worst = spec.max_place_index()
    if worst >= n_places:
        raise UnknownPlace(worst)

    bad: set[int] = set()
    wanted = set(spec.forbidden_markings)
    for i, state in enumerate(graph.states):
        marked = frozenset(p for p, m in enumerate(state) if m)
        if marked in wanted:
            bad.add(i)
            continue
        if any(not c.satisfied_by_marking(state) for c in spec.forbidden_constraints):
            bad.add(i)
    if spec.forbid_deadlocks:
        for i, out in enumerate(graph.successors):
            if not out:
                bad.add(i)
    return frozenset(bad)


def uncontrollable_closure(
    net: PetriNet, graph: ReachabilityGraph, seed: frozenset[int]
) -> frozenset[int]:
    """Least superset of ``seed`` closed under uncontrollable entry.

    Any state with an uncontrollable edge into the set joins it: from
    such a state the plant can reach the seed on its own, so a
    supervisor must treat it as already lost.
    """
    closed = set(seed)
    queue = deque(seed)
    while queue:
        dst = queue.popleft()
        for t, src in graph.predecessors[dst]:
            if not net.controllable[t] and src not in closed:
                closed.add(src)
                queue.append(src)
    return frozenset(closed)


def partition(net: PetriNet, graph: ReachabilityGraph, spec: ForbiddenSpec) -> Partition:
    """Split the graph into authorized, forbidden, and border states.

    Raises :class:`InitialStateForbidden` when the closure swallows the
    initial marking, since no supervisor can then help.
    """
    forbidden = uncontrollable_closure(net, graph, initial_forbidden(graph, spec))
    if graph.initial_index in forbidden:
        from .net import format_marking

        raise InitialStateForbidden(format_marking(net, graph.states[graph.initial_index]))
    authorized = frozenset(range(len(graph.states))) - forbidden
    border = frozenset(
        dst
        for dst in forbidden
        if any(
            net.controllable[t] and src in authorized
            for t, src in graph.predecessors[dst]
        )
    )
    return Partition(authorized=authorized, forbidden=forbidden, border=border)


def authorized_reachable(graph: ReachabilityGraph, authorized: frozenset[int]) -> frozenset[int]:
    """Authorized states reachable from the initial one through authorized states only.

    This is exactly the state set an ideal supervisor leaves reachable:
    every path out of the authorized region crosses a border state, which
    the controller blocks.
    """
    if graph.initial_index not in authorized:
        return frozenset()
    seen = {graph.initial_index}
    queue = deque([graph.initial_index])
    while queue:
        src = queue.popleft()
        for _, dst in graph.successors[src]:
            if dst in authorized and dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return frozenset(seen)


def supports_of(graph: ReachabilityGraph, indices: frozenset[int]) -> list[PlaceSet]:
    """Supports of the given states, in state-index order.

    Unlike :func:`pnsup.net.support` this tolerates the all-empty
    marking, which is a legitimate (if dead) state to classify.
    """
    return [
        frozenset(p for p, m in enumerate(graph.states[i]) if m) for i in sorted(indices)
    ]


def marking_of(graph: ReachabilityGraph, index: int) -> Marking:
    return graph.states[index]
