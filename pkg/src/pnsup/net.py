"""Safe ordinary Petri nets and their reachability graphs.

A net is a quadruple of places, transitions, and pre/post incidence
matrices over unit arcs.  Markings are boolean place vectors; the token
game is only defined while every place holds at most one token, and all
exploration here either stays within that regime or raises
:class:`~pnsup.errors.SafenessViolation`.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    EmptySupport,
    NotEnabled,
    SafenessViolation,
    StateLimitExceeded,
    UnknownPlace,
)

# A marking is a tuple of 0/1 ints, one per place, in declaration order.
Marking = tuple[int, ...]

# A place set is a frozenset of place indices.  Most of the toolkit
# manipulates supports (the marked places of a marking) in this form.
PlaceSet = frozenset[int]

DEFAULT_STATE_LIMIT = 1_000_000

_SHORT_ID = re.compile(r"[A-Za-z]\d*$")


@dataclass(frozen=True)
class PetriNet:
    """An immutable safe ordinary net.

    Attributes:
        places: place identifiers, in declaration order.
        transitions: transition identifiers, in declaration order.
        controllable: one flag per transition; uncontrollable transitions
            can never be disabled by a supervisor.
        pre: place-by-transition matrix of input-arc weights (0 or 1).
        post: place-by-transition matrix of output-arc weights (0 or 1).
        initial: the initial marking, one 0/1 entry per place.
        monitor_places: indices of places that were synthesized as
            controller monitors rather than modeled by hand.  They take
            part in the token game like any other place; the flag only
            survives so documents and drawings can mark them.
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    controllable: tuple[bool, ...]
    pre: tuple[tuple[int, ...], ...]
    post: tuple[tuple[int, ...], ...]
    initial: Marking
    monitor_places: PlaceSet = field(default=frozenset())

    def __post_init__(self) -> None:
        n_p, n_t = len(self.places), len(self.transitions)
        if n_p == 0:
            raise ValueError("a net needs at least one place")
        if len(self.controllable) != n_t:
            raise ValueError("controllable flags do not match the transition count")
        for name, matrix in (("pre", self.pre), ("post", self.post)):
            if len(matrix) != n_p or any(len(row) != n_t for row in matrix):
                raise ValueError(f"{name} matrix is not {n_p}x{n_t}")
            if any(w not in (0, 1) for row in matrix for w in row):
                raise ValueError(f"{name} matrix has a non-unit weight")
        if len(self.initial) != n_p or any(m not in (0, 1) for m in self.initial):
            raise ValueError("initial marking is not a boolean place vector")
        if any(not 0 <= p < n_p for p in self.monitor_places):
            raise ValueError("monitor place index out of range")

    @cached_property
    def place_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.places)}

    @cached_property
    def transition_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.transitions)}

    @cached_property
    def pre_sets(self) -> tuple[PlaceSet, ...]:
        """Input places of each transition."""
        return tuple(
            frozenset(p for p in range(len(self.places)) if self.pre[p][t])
            for t in range(len(self.transitions))
        )

    @cached_property
    def post_sets(self) -> tuple[PlaceSet, ...]:
        """Output places of each transition."""
        return tuple(
            frozenset(p for p in range(len(self.places)) if self.post[p][t])
            for t in range(len(self.transitions))
        )

    def incidence_column(self, t: int) -> tuple[int, ...]:
        """Token change per place when transition ``t`` fires."""
        return tuple(self.post[p][t] - self.pre[p][t] for p in range(len(self.places)))

    @classmethod
    def from_arcs(
        cls,
        places: Sequence[tuple[str, int]],
        transitions: Sequence[tuple[str, bool]],
        arcs: Iterable[tuple[str, str]],
        monitor_places: Iterable[str] = (),
    ) -> "PetriNet":
        """Build a net from ``(source, target)`` unit arcs.

        Each arc must connect a place and a transition; anything else
        raises :class:`UnknownPlace` or ``ValueError``.
        """
        place_ids = [p for p, _ in places]
        trans_ids = [t for t, _ in transitions]
        p_idx = {p: i for i, p in enumerate(place_ids)}
        t_idx = {t: i for i, t in enumerate(trans_ids)}
        pre = [[0] * len(trans_ids) for _ in place_ids]
        post = [[0] * len(trans_ids) for _ in place_ids]
        for src, dst in arcs:
            if src in p_idx and dst in t_idx:
                pre[p_idx[src]][t_idx[dst]] = 1
            elif src in t_idx and dst in p_idx:
                post[p_idx[dst]][t_idx[src]] = 1
            else:
                raise ValueError(f"arc {src!r} -> {dst!r} does not connect a place and a transition")
        return cls(
            places=tuple(place_ids),
            transitions=tuple(trans_ids),
            controllable=tuple(bool(c) for _, c in transitions),
            pre=tuple(tuple(row) for row in pre),
            post=tuple(tuple(row) for row in post),
            initial=tuple(int(m) for _, m in places),
            monitor_places=frozenset(p_idx[p] for p in monitor_places),
        )


@dataclass(frozen=True)
class ReachabilityGraph:
    """The explicit state graph of a safe net.

    States appear in breadth-first discovery order with the initial
    marking first; edges are ``(source index, transition index, target
    index)`` triples and cover every enabled firing, so a state with no
    outgoing edge is a dead marking.
    """

    states: tuple[Marking, ...]
    edges: tuple[tuple[int, int, int], ...]
    initial_index: int = 0

    @cached_property
    def state_index(self) -> dict[Marking, int]:
        return {m: i for i, m in enumerate(self.states)}

    @cached_property
    def successors(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per state: ``(transition, target)`` pairs in firing order."""
        out: list[list[tuple[int, int]]] = [[] for _ in self.states]
        for src, t, dst in self.edges:
            out[src].append((t, dst))
        return tuple(tuple(row) for row in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per state: ``(transition, source)`` pairs."""
        inc: list[list[tuple[int, int]]] = [[] for _ in self.states]
        for src, t, dst in self.edges:
            inc[dst].append((t, src))
        return tuple(tuple(row) for row in inc)


def enabled(net: PetriNet, marking: Marking) -> frozenset[int]:
    """Transitions enabled at ``marking``: every input place is marked."""
    return frozenset(
        t for t, pre in enumerate(net.pre_sets) if all(marking[p] for p in pre)
    )


def fire(net: PetriNet, marking: Marking, t: int) -> Marking:
    """Fire transition ``t`` and return the successor marking.

    Raises :class:`NotEnabled` if an input place is unmarked and
    :class:`SafenessViolation` if the result would put two tokens on a
    place (the only way this happens on unit arcs is an output place
    that is already marked and not consumed by the same firing).
    """
    if any(not marking[p] for p in net.pre_sets[t]):
        raise NotEnabled(net.transitions[t], format_marking(net, marking))
    result = list(marking)
    for p in net.pre_sets[t]:
        result[p] -= 1
    for p in net.post_sets[t]:
        result[p] += 1
        if result[p] > 1:
            raise SafenessViolation(
                net.places[p], net.transitions[t], format_marking(net, marking)
            )
    return tuple(result)


def reach(net: PetriNet, state_limit: int = DEFAULT_STATE_LIMIT) -> ReachabilityGraph:
    """Breadth-first reachability graph from the initial marking.

    Transitions are tried in declaration order from each state, so the
    discovery order (and therefore state indices and edge order) is a
    deterministic function of the net alone.  Exploration never
    truncates tokens: an unsafe firing raises
    :class:`SafenessViolation`, and more than ``state_limit`` distinct
    markings raises :class:`StateLimitExceeded`.
    """
    if state_limit < 1:
        raise ValueError("state_limit must be at least 1")
    states: list[Marking] = [net.initial]
    index = {net.initial: 0}
    edges: list[tuple[int, int, int]] = []
    queue: deque[int] = deque([0])
    while queue:
        src = queue.popleft()
        marking = states[src]
        for t in range(len(net.transitions)):
            if any(not marking[p] for p in net.pre_sets[t]):
                continue
            target = fire(net, marking, t)
            dst = index.get(target)
            if dst is None:
                if len(states) >= state_limit:
                    raise StateLimitExceeded(state_limit)
                dst = len(states)
                states.append(target)
                index[target] = dst
                queue.append(dst)
            edges.append((src, t, dst))
    return ReachabilityGraph(states=tuple(states), edges=tuple(edges))


def support(marking: Marking) -> PlaceSet:
    """Indices of the marked places; empty markings raise :class:`EmptySupport`."""
    s = frozenset(p for p, m in enumerate(marking) if m)
    if not s:
        raise EmptySupport()
    return s


def marking_from_support(places: PlaceSet, n_places: int) -> Marking:
    """The boolean marking whose marked places are exactly ``places``."""
    for p in places:
        if not 0 <= p < n_places:
            raise UnknownPlace(p)
    return tuple(1 if p in places else 0 for p in range(n_places))


def verify_place_invariant(
    graph: ReachabilityGraph, weights: Sequence[int], k: int
) -> bool:
    """Check that the weighted token count equals ``k`` in every state."""
    return all(
        sum(w * m for w, m in zip(weights, state)) == k for state in graph.states
    )


def verify_partial_invariant(
    states: ReachabilityGraph | Iterable[Marking], weights: Sequence[int], k: int
) -> bool:
    """Check that the weighted token count stays at most ``k``.

    Accepts either a full reachability graph or any iterable of
    markings, so callers can restrict the check to a subset of states.
    """
    markings = states.states if isinstance(states, ReachabilityGraph) else states
    return all(sum(w * m for w, m in zip(weights, state)) <= k for state in markings)


def support_label(places: PlaceSet | Iterable[int], place_ids: Sequence[str]) -> str:
    """Compact human-readable label for a place set, e.g. ``P1P3``.

    Identifiers that look like a letter plus digits are concatenated;
    anything longer is joined with ``+`` to stay unambiguous.
    """
    ids = [place_ids[p] for p in sorted(places)]
    if not ids:
        return "(empty)"
    if all(_SHORT_ID.fullmatch(i) for i in ids):
        return "".join(ids)
    return "+".join(ids)


def format_marking(net: PetriNet, marking: Marking) -> str:
    marked = [p for p, m in enumerate(marking) if m]
    if not marked:
        return "(empty)"
    return support_label(frozenset(marked), net.places)
