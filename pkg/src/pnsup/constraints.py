"""Generalized mutual-exclusion constraints over place markings.

A constraint bounds a weighted sum of place markings: ``sum(w_p * m_p)
<= bound``.  The toolkit mostly produces unit-weight constraints (every
weight one), which have a direct reading on safe nets: at most ``bound``
of the listed places may be marked at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .net import Marking, PlaceSet

__all__ = ["Constraint", "admits", "admits_all", "forbids_each"]


@dataclass(frozen=True)
class Constraint:
    """``sum over (place, weight) terms <= bound``, weights positive."""

    terms: tuple[tuple[int, int], ...]
    bound: int

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("a constraint needs at least one weighted place")
        if self.bound < 0:
            raise ValueError("constraint bound must be nonnegative")
        places = [p for p, _ in self.terms]
        if len(set(places)) != len(places):
            raise ValueError("constraint lists a place twice")
        if any(w < 1 for _, w in self.terms):
            raise ValueError("constraint weights must be positive")
        if list(self.terms) != sorted(self.terms):
            raise ValueError("constraint terms must be sorted by place index")

    @classmethod
    def unit(cls, places: Iterable[int], bound: int) -> "Constraint":
        return cls(terms=tuple((p, 1) for p in sorted(places)), bound=bound)

    @classmethod
    def from_weights(cls, weights: Mapping[int, int], bound: int) -> "Constraint":
        return cls(terms=tuple(sorted(weights.items())), bound=bound)

    @cached_property
    def support(self) -> PlaceSet:
        return frozenset(p for p, _ in self.terms)

    @cached_property
    def is_unit(self) -> bool:
        return all(w == 1 for _, w in self.terms)

    def weight_row(self, n_places: int) -> tuple[int, ...]:
        """The constraint as a dense weight vector of length ``n_places``."""
        row = [0] * n_places
        for p, w in self.terms:
            row[p] = w
        return tuple(row)

    def value_on_marking(self, marking: Marking) -> int:
        return sum(w * marking[p] for p, w in self.terms)

    def value_on_support(self, places: PlaceSet) -> int:
        return sum(w for p, w in self.terms if p in places)

    def satisfied_by_marking(self, marking: Marking) -> bool:
        return self.value_on_marking(marking) <= self.bound

    def satisfied_by_support(self, places: PlaceSet) -> bool:
        return self.value_on_support(places) <= self.bound

    def subsumes(self, other: "Constraint") -> bool:
        """True when every marking satisfying this constraint satisfies ``other``.

        Only claimed for unit constraints: a wider support with an equal
        or smaller bound dominates.  Identical constraints subsume each
        other.
        """
        if not (self.is_unit and other.is_unit):
            return self == other
        return other.support <= self.support and self.bound <= other.bound

    def sort_key(self) -> tuple:
        # canonical order: lexicographic by sorted support, then bound, then weights
        return (tuple(sorted(self.support)), self.bound, self.terms)

    def compact(self, place_ids: Sequence[str]) -> str:
        """E.g. ``(P2 P4, 1)``; weights other than one are prefixed."""
        parts = []
        for p, w in self.terms:
            parts.append(place_ids[p] if w == 1 else f"{w}*{place_ids[p]}")
        return f"({' '.join(parts)}, {self.bound})"

    def inequality(self, place_ids: Sequence[str]) -> str:
        """E.g. ``m2+m4 <= 1``, using the digits of P-style identifiers."""
        parts = []
        for p, w in self.terms:
            name = place_ids[p]
            var = f"m{name[1:]}" if name[:1] in ("P", "p") and name[1:].isdigit() else f"m({name})"
            parts.append(var if w == 1 else f"{w}*{var}")
        return f"{'+'.join(parts)} <= {self.bound}"

    def to_json(self, place_ids: Sequence[str]) -> dict:
        doc: dict = {
            "places": [place_ids[p] for p, _ in self.terms],
            "bound": self.bound,
            "compact": self.compact(place_ids),
            "inequality": self.inequality(place_ids),
        }
        if not self.is_unit:
            doc["weights"] = [w for _, w in self.terms]
        return doc


def admits(constraints: Iterable[Constraint], places: PlaceSet) -> bool:
    """True when the support satisfies every constraint."""
    return all(c.satisfied_by_support(places) for c in constraints)


def admits_all(constraints: Sequence[Constraint], supports: Iterable[PlaceSet]) -> bool:
    return all(admits(constraints, s) for s in supports)


def forbids_each(constraints: Sequence[Constraint], supports: Iterable[PlaceSet]) -> bool:
    """True when every given support violates at least one constraint."""
    return all(not admits(constraints, s) for s in supports)
