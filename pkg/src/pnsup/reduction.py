"""Reducing border markings to a small set of forbidding constraints.

On a safe net, forbidding a set of places ``b`` with the constraint
``sum(m_p for p in b) <= len(b) - 1`` forbids exactly the markings whose
support contains ``b``.  Any subset of a border support that no
authorized support contains therefore forbids the border marking without
losing an authorized one.  This module enumerates the minimal such
subsets, tabulates which border markings each one forbids, and picks a
minimum-cardinality selection of them.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .constraints import Constraint
from .errors import EmptySupport, Uncoverable
from .net import Marking, PlaceSet, support, support_label

__all__ = [
    "is_overstate_of",
    "covered_by_authorized",
    "authorized_cover_oracle",
    "minimal_overstates",
    "CoverTable",
    "CoverSelection",
    "select_cover",
    "overstate_constraint",
    "marking_constraint",
    "DEFAULT_EXACT_THRESHOLD",
]

# Exact cover selection runs while 2**candidate_rows stays at or below this.
DEFAULT_EXACT_THRESHOLD = 2**20

# Membership test against the downward closure of the authorized supports.
CoverOracle = Callable[[PlaceSet], bool]


def _index_label(places: PlaceSet) -> str:
    return "{" + ",".join(str(p) for p in sorted(places)) + "}"


def is_overstate_of(candidate: PlaceSet, state_support: PlaceSet) -> bool:
    """True when every place of ``candidate`` is marked in the state."""
    return candidate <= state_support


def covered_by_authorized(
    candidate: PlaceSet, authorized_supports: Iterable[PlaceSet]
) -> bool:
    """True when some authorized support contains the candidate.

    Forbidding such a candidate would forbid that authorized marking
    too, so covered candidates are useless as separators.
    """
    return any(candidate <= s for s in authorized_supports)


def authorized_cover_oracle(authorized_supports: Sequence[PlaceSet]) -> CoverOracle:
    """Memoized form of :func:`covered_by_authorized` for repeated queries."""
    cache: dict[PlaceSet, bool] = {}

    def member(candidate: PlaceSet) -> bool:
        hit = cache.get(candidate)
        if hit is None:
            hit = any(candidate <= s for s in authorized_supports)
            cache[candidate] = hit
        return hit

    return member


def minimal_overstates(
    border_supports: Sequence[PlaceSet],
    authorized_supports: Sequence[PlaceSet] | None = None,
    *,
    oracle: CoverOracle | None = None,
) -> list[PlaceSet]:
    """Minimal subsets of border supports that no authorized support contains.

    Enumerates candidate subsets bottom-up by cardinality, skipping
    supersets of already-accepted sets, so the result is an antichain of
    exactly the minimal separators.  Raises :class:`Uncoverable` when a
    border support is itself contained in an authorized support; no
    subset can then separate it.

    Either the authorized supports or a membership oracle for their
    downward closure must be supplied.
    """
    if oracle is None:
        if authorized_supports is None:
            raise ValueError("need authorized_supports or an oracle")
        oracle = authorized_cover_oracle(authorized_supports)

    for b in border_supports:
        if oracle(b):
            raise Uncoverable(_index_label(b))

    # Distinct subsets, deduplicated across border supports, by size.
    by_size: dict[int, set[PlaceSet]] = {}
    for b in border_supports:
        members = sorted(b)
        for k in range(1, len(members) + 1):
            bucket = by_size.setdefault(k, set())
            for combo in combinations(members, k):
                bucket.add(frozenset(combo))

    accepted: list[PlaceSet] = []
    for k in sorted(by_size):
        for cand in sorted(by_size[k], key=sorted):
            if any(m <= cand for m in accepted):
                continue  # a smaller separator already handles anything cand would
            if not oracle(cand):
                accepted.append(cand)
    return accepted


@dataclass(frozen=True)
class CoverTable:
    """Which candidate place set forbids which border marking.

    Rows are candidates, columns are border supports, and every cell is
    recomputed from the subset test; the table never trusts an external
    tabulation.  ``column_counts`` gives per column the number of rows
    that cover it.
    """

    rows: tuple[PlaceSet, ...]
    columns: tuple[PlaceSet, ...]
    cells: tuple[tuple[bool, ...], ...]
    column_counts: tuple[int, ...]

    @classmethod
    def build(
        cls, candidates: Sequence[PlaceSet], border_supports: Sequence[PlaceSet]
    ) -> "CoverTable":
        cells = tuple(
            tuple(is_overstate_of(row, col) for col in border_supports)
            for row in candidates
        )
        counts = tuple(
            sum(cells[i][j] for i in range(len(candidates)))
            for j in range(len(border_supports))
        )
        return cls(
            rows=tuple(candidates),
            columns=tuple(border_supports),
            cells=cells,
            column_counts=counts,
        )

    def row_cover(self, i: int) -> frozenset[int]:
        return frozenset(j for j, hit in enumerate(self.cells[i]) if hit)

    def to_csv(self, place_ids: Sequence[str]) -> str:
        """Delimited 0/1 matrix with a trailing per-column count row."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([""] + [support_label(c, place_ids) for c in self.columns])
        for row, cells in zip(self.rows, self.cells):
            writer.writerow([support_label(row, place_ids)] + [int(c) for c in cells])
        writer.writerow(["covers"] + list(self.column_counts))
        return out.getvalue()

    def to_json(self, place_ids: Sequence[str]) -> dict:
        return {
            "rows": [support_label(r, place_ids) for r in self.rows],
            "columns": [support_label(c, place_ids) for c in self.columns],
            "cells": [[int(c) for c in row] for row in self.cells],
            "column_counts": list(self.column_counts),
        }


@dataclass(frozen=True)
class CoverSelection:
    """Outcome of :func:`select_cover`: chosen row indices and how.

    ``essential`` lists the rows forced by columns only one row covers;
    ``method`` records whether the completion beyond them was solved
    exactly, greedily, or was not needed at all.
    """

    rows: tuple[int, ...]
    essential: tuple[int, ...]
    method: str

    def sets(self, table: CoverTable) -> tuple[PlaceSet, ...]:
        return tuple(table.rows[i] for i in self.rows)


def select_cover(
    table: CoverTable, exact_threshold: int = DEFAULT_EXACT_THRESHOLD
) -> CoverSelection:
    """Pick rows so every column is covered, minimizing the row count.

    Rows that are the sole cover of some column are always taken.  The
    remainder is solved exactly by branch and bound while the search
    space (two to the number of useful remaining rows) stays within
    ``exact_threshold``; beyond that a greedy pass takes over, preferring
    rows that cover the most uncovered columns and breaking ties by row
    order.  A column no row covers raises :class:`Uncoverable`.
    """
    n_rows = len(table.rows)
    n_cols = len(table.columns)
    for j, count in enumerate(table.column_counts):
        if count == 0:
            raise Uncoverable(_index_label(table.columns[j]))

    row_cover = [table.row_cover(i) for i in range(n_rows)]
    chosen: set[int] = set()
    for j in range(n_cols):
        if table.column_counts[j] == 1:
            chosen.add(next(i for i in range(n_rows) if table.cells[i][j]))
    essential = tuple(sorted(chosen))

    covered: set[int] = set()
    for i in chosen:
        covered |= row_cover[i]
    remaining = [j for j in range(n_cols) if j not in covered]
    method = "essential"
    if remaining:
        candidates = [
            i for i in range(n_rows) if i not in chosen and row_cover[i] & set(remaining)
        ]
        if 2 ** len(candidates) <= exact_threshold:
            completion = _exact_completion(candidates, row_cover, frozenset(remaining))
            method = "exact"
        else:
            completion = _greedy_completion(candidates, row_cover, set(remaining))
            method = "greedy"
        chosen |= completion
    return CoverSelection(rows=tuple(sorted(chosen)), essential=essential, method=method)


def _exact_completion(
    candidates: list[int],
    row_cover: list[frozenset[int]],
    remaining: frozenset[int],
) -> set[int]:
    """Minimum-cardinality completion by depth-first branch and bound."""
    best: list[set[int] | None] = [None]
    best_size = [len(candidates) + 1]
    max_gain = max((len(row_cover[i] & remaining) for i in candidates), default=1)

    def descend(uncovered: frozenset[int], picked: set[int]) -> None:
        if not uncovered:
            if len(picked) < best_size[0]:
                best[0] = set(picked)
                best_size[0] = len(picked)
            return
        # lower bound: even perfect rows need this many more picks
        need = -(-len(uncovered) // max_gain)
        if len(picked) + need >= best_size[0]:
            return
        # branch on the hardest column: fewest candidate rows
        col = min(
            uncovered,
            key=lambda j: (sum(1 for i in candidates if j in row_cover[i]), j),
        )
        for i in candidates:
            if col in row_cover[i] and i not in picked:
                picked.add(i)
                descend(uncovered - row_cover[i], picked)
                picked.remove(i)

    descend(remaining, set())
    if best[0] is None:  # pragma: no cover - guarded by the column_counts check
        raise Uncoverable("selection failed")
    return best[0]


def _greedy_completion(
    candidates: list[int],
    row_cover: list[frozenset[int]],
    remaining: set[int],
) -> set[int]:
    picked: set[int] = set()
    while remaining:
        gain, best_row = 0, -1
        for i in candidates:
            if i in picked:
                continue
            g = len(row_cover[i] & remaining)
            if g > gain:
                gain, best_row = g, i
        if best_row < 0:  # pragma: no cover - guarded by the column_counts check
            raise Uncoverable("selection failed")
        picked.add(best_row)
        remaining -= row_cover[best_row]
    return picked


def overstate_constraint(places: PlaceSet) -> Constraint:
    """Forbid markings containing ``places``: at most ``len - 1`` of them marked."""
    if not places:
        raise EmptySupport()
    return Constraint.unit(places, len(places) - 1)


def marking_constraint(marking: Marking) -> Constraint:
    """Forbid one marking (and any support-superset of it) directly."""
    return overstate_constraint(support(marking))
