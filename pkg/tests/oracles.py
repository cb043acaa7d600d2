"""Brute-force reference answers the tests trust instead of the package.

Everything here recomputes results from first principles by exhaustive
enumeration, with none of the pruning or memoization the package uses,
so the optimized code paths have an independent answer to be compared
against.  Deliberately slow; only ever run on desk-scale inputs.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Iterable, Sequence

from pnsup.constraints import Constraint
from pnsup.monitor import ControlledNet
from pnsup.net import Marking, PetriNet, PlaceSet


def nonempty_subsets(places: Iterable[int]) -> list[PlaceSet]:
    members = sorted(places)
    return [
        frozenset(combo)
        for k in range(1, len(members) + 1)
        for combo in combinations(members, k)
    ]


def covered(candidate: PlaceSet, authorized_supports: Iterable[PlaceSet]) -> bool:
    return any(candidate <= s for s in authorized_supports)


def brute_minimal_separators(
    border_supports: Sequence[PlaceSet], authorized_supports: Sequence[PlaceSet]
) -> list[PlaceSet]:
    """Minimal uncovered subsets of border supports, by full enumeration."""
    pool: set[PlaceSet] = set()
    for b in border_supports:
        pool.update(nonempty_subsets(b))
    useful = [s for s in pool if not covered(s, authorized_supports)]
    return sorted(
        (s for s in useful if not any(o < s for o in useful)),
        key=lambda s: (len(s), sorted(s)),
    )


def subset_cells(
    candidates: Sequence[PlaceSet], border_supports: Sequence[PlaceSet]
) -> list[list[bool]]:
    """The coverage matrix, one subset test per cell, nothing shared."""
    return [[set(c) <= set(b) for b in border_supports] for c in candidates]


def brute_minimum_cover_size(
    cells: Sequence[Sequence[bool]], n_cols: int
) -> int | None:
    """Cardinality of the smallest covering row set; None when no cover exists."""
    n_rows = len(cells)
    row_cover = [
        frozenset(j for j in range(n_cols) if cells[i][j]) for i in range(n_rows)
    ]
    everything = frozenset(range(n_cols))
    for k in range(n_rows + 1):
        for combo in combinations(range(n_rows), k):
            got: frozenset[int] = frozenset()
            for i in combo:
                got |= row_cover[i]
            if got == everything:
                return k
    return None


def constrained_reach_supports(
    net: PetriNet, constraints: Sequence[Constraint], state_limit: int = 100_000
) -> set[PlaceSet]:
    """Closed-loop supports without monitors: block any firing whose result
    violates a constraint.  This is what monitor places are supposed to
    implement, so it doubles as an oracle for the synthesized net."""
    seen: set[Marking] = {net.initial}
    queue: deque[Marking] = deque([net.initial])
    while queue:
        marking = queue.popleft()
        for t in range(len(net.transitions)):
            if any(not marking[p] for p in net.pre_sets[t]):
                continue
            nxt = list(marking)
            for p in net.pre_sets[t]:
                nxt[p] -= 1
            for p in net.post_sets[t]:
                nxt[p] += 1
            if any(v > 1 for v in nxt):
                raise AssertionError("oracle expects a safe base net")
            target = tuple(nxt)
            if not all(c.satisfied_by_marking(target) for c in constraints):
                continue
            if target not in seen:
                if len(seen) >= state_limit:
                    raise AssertionError("oracle state limit hit")
                seen.add(target)
                queue.append(target)
    return {frozenset(p for p, v in enumerate(m) if v) for m in seen}


def controlled_reach_states(
    controlled: ControlledNet, state_limit: int = 100_000
) -> list[tuple[Marking, tuple[int, ...]]]:
    """Every (base marking, monitor counts) state of the controlled token game.

    Independent re-walk of the monitor semantics: a transition needs its
    base inputs marked and every monitor it draws from sufficiently full.
    """
    net = controlled.base
    start = (net.initial, tuple(m.initial_tokens for m in controlled.monitors))
    seen = {start}
    queue = deque([start])
    out = [start]
    while queue:
        base, slack = queue.popleft()
        for t in range(len(net.transitions)):
            if any(not base[p] for p in net.pre_sets[t]):
                continue
            next_slack = tuple(
                s + m.flow[t] for s, m in zip(slack, controlled.monitors)
            )
            if any(s < 0 for s in next_slack):
                continue
            nxt = list(base)
            for p in net.pre_sets[t]:
                nxt[p] -= 1
            for p in net.post_sets[t]:
                nxt[p] += 1
            if any(v > 1 for v in nxt):
                raise AssertionError("oracle expects a safe controlled net")
            state = (tuple(nxt), next_slack)
            if state not in seen:
                if len(seen) >= state_limit:
                    raise AssertionError("oracle state limit hit")
                seen.add(state)
                queue.append(state)
                out.append(state)
    return out


def classify(constraints: Sequence[Constraint], support: PlaceSet) -> bool:
    """True when the support satisfies every constraint (admitted)."""
    return all(
        sum(w for p, w in c.terms if p in support) <= c.bound for c in constraints
    )
