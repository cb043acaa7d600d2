"""Turning marking constraints into monitor places.

Each constraint ``L_i . m_p <= b_i`` becomes one new place whose token
count keeps the slack ``b_i - L_i . m_p``: its arc weights are the
negated constraint-weighted token flow of each transition, and its
initial tokens are the slack at the initial marking.  The stacked place
invariant ``L_i . m_p + m_s_i = b_i`` then holds in every reachable
marking of the controlled net, so a transition that would overdraw the
bound is structurally disabled.

Monitor places may legitimately hold more than one token (their bound),
and a single firing may move more than one token through them when a
transition touches several constrained places at once, so the controlled
net is explored with integer monitor counts while the base places stay
boolean.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Collection, Sequence

from .constraints import Constraint
from .errors import InitialViolation, SafenessViolation, StateLimitExceeded, UnknownPlace
from .net import (
    DEFAULT_STATE_LIMIT,
    Marking,
    PetriNet,
    PlaceSet,
    format_marking,
    support,
)

__all__ = [
    "ConstraintMatrix",
    "ControlPlace",
    "ControlledNet",
    "AdmissibilityWarning",
    "VerificationReport",
    "to_matrix",
    "synthesize",
    "admissibility_check",
    "closed_loop_verify",
]


@dataclass(frozen=True)
class ConstraintMatrix:
    """Dense constraint weights: one row per constraint, one column per place."""

    weights: tuple[tuple[int, ...], ...]
    bounds: tuple[int, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.bounds) or len(self.weights) != len(self.constraints):
            raise ValueError("row count mismatch")


@dataclass(frozen=True)
class ControlPlace:
    """One synthesized monitor.

    ``flow`` holds the token change per transition (negative entries are
    monitor-to-transition arcs, positive ones transition-to-monitor).
    """

    id: str
    flow: tuple[int, ...]
    initial_tokens: int
    constraint: Constraint


@dataclass(frozen=True)
class ControlledNet:
    """The plant net plus its monitor places; the base net is unchanged."""

    base: PetriNet
    monitors: tuple[ControlPlace, ...]


@dataclass(frozen=True)
class AdmissibilityWarning:
    """A monitor that would have to disable an uncontrollable transition."""

    monitor: str
    transition: str

    def to_json(self) -> dict:
        return {"monitor": self.monitor, "transition": self.transition}


@dataclass(frozen=True)
class VerificationReport:
    """Closed-loop check result against an expected authorized set."""

    reached: tuple[PlaceSet, ...]
    missing: tuple[PlaceSet, ...]
    extra: tuple[PlaceSet, ...]
    maximal_permissive: bool
    controlled_states: int

    def to_json(self, place_ids: Sequence[str]) -> dict:
        as_lists = lambda sets: [[place_ids[p] for p in sorted(s)] for s in sets]
        return {
            "reached": as_lists(self.reached),
            "missing": as_lists(self.missing),
            "extra": as_lists(self.extra),
            "maximal_permissive": self.maximal_permissive,
            "controlled_states": self.controlled_states,
        }


def to_matrix(constraints: Sequence[Constraint], net: PetriNet) -> ConstraintMatrix:
    """Stack constraints into dense rows over the net's places."""
    n = len(net.places)
    for c in constraints:
        for p in c.support:
            if not 0 <= p < n:
                raise UnknownPlace(p)
    return ConstraintMatrix(
        weights=tuple(c.weight_row(n) for c in constraints),
        bounds=tuple(c.bound for c in constraints),
        constraints=tuple(constraints),
    )


def synthesize(
    net: PetriNet, matrix: ConstraintMatrix, ids: Sequence[str] | None = None
) -> ControlledNet:
    """Build one monitor place per constraint row.

    Monitor ids default to ``c1, c2, ...``, suffixed with underscores if
    the net already uses the name.  Raises :class:`InitialViolation`
    when the initial marking already violates a row, since the monitor
    would need a negative token count.
    """
    n_t = len(net.transitions)
    taken = set(net.places) | set(net.transitions)
    monitors = []
    for i, (row, bound, constraint) in enumerate(
        zip(matrix.weights, matrix.bounds, matrix.constraints)
    ):
        flow = tuple(
            -sum(row[p] * (net.post[p][t] - net.pre[p][t]) for p in range(len(net.places)))
            for t in range(n_t)
        )
        slack = bound - sum(w * m for w, m in zip(row, net.initial))
        if slack < 0:
            raise InitialViolation(constraint.compact(net.places), slack)
        if ids is not None:
            name = ids[i]
        else:
            name = f"c{i + 1}"
            while name in taken:
                name += "_"
        taken.add(name)
        monitors.append(
            ControlPlace(id=name, flow=flow, initial_tokens=slack, constraint=constraint)
        )
    return ControlledNet(base=net, monitors=tuple(monitors))


def admissibility_check(controlled: ControlledNet) -> list[AdmissibilityWarning]:
    """Flag monitor arcs that feed uncontrollable transitions.

    Such an arc means the supervisor relies on withholding a token from
    a transition it has no authority over; the controller may still be
    correct if the situation is unreachable, so this is a warning, not
    an error.
    """
    warnings = []
    for monitor in controlled.monitors:
        for t, w in enumerate(monitor.flow):
            if w < 0 and not controlled.base.controllable[t]:
                warnings.append(
                    AdmissibilityWarning(
                        monitor=monitor.id,
                        transition=controlled.base.transitions[t],
                    )
                )
    return warnings


def closed_loop_verify(
    controlled: ControlledNet,
    expected_authorized: Collection[PlaceSet],
    state_limit: int = DEFAULT_STATE_LIMIT,
) -> VerificationReport:
    """Explore the controlled net and compare base supports with a target.

    A transition fires only when its base input places are marked and
    every monitor it draws from holds enough tokens.  Base places must
    stay boolean (:class:`SafenessViolation` otherwise); monitor counts
    are integers and bounded by their constraint bound through the
    stacked invariant.
    """
    net = controlled.base
    n_t = len(net.transitions)
    start = (net.initial, tuple(m.initial_tokens for m in controlled.monitors))
    seen = {start}
    queue = deque([start])
    reached: set[PlaceSet] = set()
    count = 0
    while queue:
        base, slack = queue.popleft()
        count += 1
        reached.add(frozenset(p for p, m in enumerate(base) if m))
        for t in range(n_t):
            if any(not base[p] for p in net.pre_sets[t]):
                continue
            if any(s + m.flow[t] < 0 for s, m in zip(slack, controlled.monitors)):
                continue
            nxt = list(base)
            for p in net.pre_sets[t]:
                nxt[p] -= 1
            for p in net.post_sets[t]:
                nxt[p] += 1
                if nxt[p] > 1:
                    raise SafenessViolation(
                        net.places[p], net.transitions[t], format_marking(net, base)
                    )
            state = (
                tuple(nxt),
                tuple(s + m.flow[t] for s, m in zip(slack, controlled.monitors)),
            )
            if state not in seen:
                if len(seen) >= state_limit:
                    raise StateLimitExceeded(state_limit)
                seen.add(state)
                queue.append(state)
    expected = {frozenset(s) for s in expected_authorized}
    missing = sorted(expected - reached, key=sorted)
    extra = sorted(reached - expected, key=sorted)
    return VerificationReport(
        reached=tuple(sorted(reached, key=sorted)),
        missing=tuple(missing),
        extra=tuple(extra),
        maximal_permissive=not missing and not extra,
        controlled_states=count,
    )
