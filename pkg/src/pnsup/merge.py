"""Folding families of unit constraints into fewer, wider ones.

Two unit constraints with the same bound that differ in few places can
often be replaced by one constraint over the union of their supports,
provided no authorized marking covers any of the place sets the wider
constraint newly forbids.  The rules here implement that idea at
increasing generality, and :func:`merge_fixpoint` applies them to
exhaustion under a global safety gate: a merge that would change how any
supplied marking is classified is rolled back.

All membership questions go through a single oracle for the downward
closure of the authorized supports (does some authorized support contain
this place set?), so the rules work both from explicit state sets and
from synthetic oracles in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .constraints import Constraint, admits
from .errors import CombinatorialLimit
from .net import PlaceSet
from .reduction import CoverOracle, authorized_cover_oracle

__all__ = [
    "MergeConfig",
    "MergeStep",
    "MergeTrace",
    "mutual_exclusion_pair",
    "extend_mutual_exclusion",
    "fold_exclusive_heads",
    "merge_sibling_pair",
    "absorb_sibling",
    "merge_fixpoint",
    "replay_trace",
]

Evidence = list[tuple[PlaceSet, bool]]

DEFAULT_SUBSET_CAP = 10**6


@dataclass(frozen=True)
class MergeConfig:
    """Tunables for :func:`merge_fixpoint`."""

    subset_cap: int = DEFAULT_SUBSET_CAP


@dataclass(frozen=True)
class MergeStep:
    """One event in a merge run.

    kind is one of ``fold-heads``, ``merge-siblings``, ``absorb-sibling``
    (rule applications), or ``subsume`` (a constraint dropped because a
    kept one dominates it).  Rejected rule applications stay in the
    trace with ``accepted`` false and the reason in ``note``.
    """

    kind: str
    inputs: tuple[Constraint, ...]
    output: Constraint | None
    evidence: tuple[tuple[PlaceSet, bool], ...] = ()
    accepted: bool = True
    note: str = ""
    by: Constraint | None = None

    def to_json(self, place_ids: Sequence[str]) -> dict:
        doc: dict = {
            "kind": self.kind,
            "inputs": [c.to_json(place_ids) for c in self.inputs],
            "output": self.output.to_json(place_ids) if self.output else None,
            "accepted": self.accepted,
        }
        if self.evidence:
            doc["evidence"] = [
                {
                    "places": [place_ids[p] for p in sorted(s)],
                    "covered_by_authorized": hit,
                }
                for s, hit in self.evidence
            ]
        if self.note:
            doc["note"] = self.note
        if self.by is not None:
            doc["by"] = self.by.to_json(place_ids)
        return doc


@dataclass(frozen=True)
class MergeTrace:
    """Every step of a merge run, in order, replayable."""

    steps: tuple[MergeStep, ...] = ()

    def to_json(self, place_ids: Sequence[str]) -> list[dict]:
        return [s.to_json(place_ids) for s in self.steps]


def replay_trace(
    initial: Iterable[Constraint], trace: MergeTrace
) -> tuple[Constraint, ...]:
    """Re-apply a trace to the initial constraints; used to audit runs."""
    working = list(initial)
    for step in trace.steps:
        if not step.accepted:
            continue
        for c in step.inputs:
            working.remove(c)
        if step.output is not None:
            working.append(step.output)
    return tuple(sorted(working, key=Constraint.sort_key))


def mutual_exclusion_pair(
    p1: int, p2: int, oracle: CoverOracle, evidence: Evidence | None = None
) -> Constraint | None:
    """``m_p1 + m_p2 <= 1`` holds iff no authorized support has both places."""
    if p1 == p2:
        raise ValueError("a place cannot exclude itself")
    covered = oracle(frozenset((p1, p2)))
    if evidence is not None:
        evidence.append((frozenset((p1, p2)), covered))
    return None if covered else Constraint.unit((p1, p2), 1)


def extend_mutual_exclusion(
    c: Constraint, p: int, oracle: CoverOracle, evidence: Evidence | None = None
) -> Constraint | None:
    """Add a place to an at-most-one constraint.

    Valid iff the new place is pairwise exclusive with every existing
    one; any authorized support containing such a pair blocks it.
    """
    if not (c.is_unit and c.bound == 1):
        raise ValueError("only unit constraints with bound 1 can be extended")
    if p in c.support:
        raise ValueError("place already constrained")
    ok = True
    for q in sorted(c.support):
        covered = oracle(frozenset((q, p)))
        if evidence is not None:
            evidence.append((frozenset((q, p)), covered))
        if covered:
            ok = False
            break
    return Constraint.unit(c.support | {p}, 1) if ok else None


def fold_exclusive_heads(
    heads: PlaceSet,
    tail: PlaceSet,
    bound: int,
    working: Sequence[Constraint],
    oracle: CoverOracle,
    evidence: Evidence | None = None,
) -> Constraint | None:
    """Fold ``(h + tail <= bound)`` over all heads into one constraint.

    Requires every per-head constraint to be present in ``working``.
    Sound when at most one head can be marked at a time, which on a safe
    net is the same as no authorized support containing two heads.  A
    single head folds to its own constraint unchanged.
    """
    if not heads:
        raise ValueError("no heads to fold")
    if heads & tail:
        raise ValueError("heads and tail overlap")
    present = {c.support: c for c in working if c.is_unit and c.bound == bound}
    parts = []
    for h in sorted(heads):
        c = present.get(frozenset({h}) | tail)
        if c is None:
            raise ValueError(f"missing constraint for head {h}")
        parts.append(c)
    if len(parts) == 1:
        return parts[0]
    for h1, h2 in combinations(sorted(heads), 2):
        covered = oracle(frozenset((h1, h2)))
        if evidence is not None:
            evidence.append((frozenset((h1, h2)), covered))
        if covered:
            return None
    return Constraint.unit(heads | tail, bound)


def merge_sibling_pair(
    c1: Constraint,
    c2: Constraint,
    oracle: CoverOracle,
    evidence: Evidence | None = None,
) -> Constraint | None:
    """Merge two constraints that differ in exactly one place.

    Both must be unit constraints with the same bound ``n`` over ``n +
    1`` places sharing an ``n``-place tail.  The union forbids markings
    the originals did not; each such new pattern drops one tail place,
    and the merge is valid iff none of those patterns is covered by an
    authorized support.
    """
    _require_siblings(c1, c2)
    n = c1.bound
    shared = c1.support & c2.support
    if len(c1.support) != n + 1:
        raise ValueError("first constraint does not have bound-plus-one places")
    i1 = next(iter(c1.support - shared))
    i2 = next(iter(c2.support - shared))
    for j in sorted(shared):
        pattern = frozenset((i1, i2)) | (shared - {j})
        covered = oracle(pattern)
        if evidence is not None:
            evidence.append((pattern, covered))
        if covered:
            return None
    return Constraint.unit(c1.support | c2.support, n)


def absorb_sibling(
    c1: Constraint,
    c2: Constraint,
    oracle: CoverOracle,
    *,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    evidence: Evidence | None = None,
) -> Constraint | None:
    """Absorb a one-extra-place constraint into a wider sibling.

    ``c1`` spans several heads plus a tail of ``bound`` places; ``c2``
    adds a single new place to the same tail.  Validity is checked
    against every ``bound + 1``-subset of the union, which is the full
    set of marking patterns the union constraint forbids; when ``c1``
    has a single head this coincides with :func:`merge_sibling_pair` up
    to the two patterns that equal the original supports (harmless,
    since constraints in use never forbid an authorized marking).

    Raises :class:`CombinatorialLimit` when the subset count exceeds
    ``subset_cap``.
    """
    _require_siblings(c1, c2)
    n = c1.bound
    shared = c1.support & c2.support
    extra = c2.support - shared
    if len(extra) != 1:
        raise ValueError("second constraint must add exactly one place")
    union = c1.support | c2.support
    required = comb(len(union), n + 1)
    if required > subset_cap:
        raise CombinatorialLimit(required, subset_cap)
    for pattern in combinations(sorted(union), n + 1):
        covered = oracle(frozenset(pattern))
        if evidence is not None:
            evidence.append((frozenset(pattern), covered))
        if covered:
            return None
    return Constraint.unit(union, n)


def _require_siblings(c1: Constraint, c2: Constraint) -> None:
    if not (c1.is_unit and c2.is_unit):
        raise ValueError("merge rules only handle unit constraints")
    if c1.bound != c2.bound:
        raise ValueError("bounds differ")
    if c1.support == c2.support:
        raise ValueError("constraints are identical")
    shared = c1.support & c2.support
    if len(shared) != c1.bound:
        raise ValueError("shared tail does not match the bound")
    if len(c2.support) != c1.bound + 1:
        raise ValueError("second constraint must be tail plus one place")


@dataclass
class _Run:
    working: list[Constraint]
    oracle: CoverOracle
    config: MergeConfig
    steps: list[MergeStep] = field(default_factory=list)
    refused: set = field(default_factory=set)


def merge_fixpoint(
    constraints: Sequence[Constraint],
    *,
    authorized_supports: Sequence[PlaceSet] | None = None,
    border_supports: Sequence[PlaceSet] = (),
    other_forbidden_supports: Sequence[PlaceSet] = (),
    oracle: CoverOracle | None = None,
    config: MergeConfig | None = None,
) -> tuple[tuple[Constraint, ...], MergeTrace]:
    """Apply the merge rules to exhaustion and return the final set.

    The rules run in a fixed order (head folding, then sibling merges
    and absorptions) over constraints in canonical order, so the result
    is deterministic.  After every accepted merge, constraints whose
    support lies inside another's with an equal-or-looser bound are
    dropped as redundant.

    The gate: the input set must admit every authorized support and be
    violated by every border support, and each accepted step must keep
    those properties and must not change how any ``other_forbidden``
    support is classified relative to the input set.  A step that fails
    is rolled back and recorded.  Non-unit constraints pass through
    untouched but count in all gate evaluations.

    Membership of place sets in the authorized downward closure comes
    from ``oracle`` when given, else from ``authorized_supports``.
    """
    if oracle is None:
        if authorized_supports is None:
            raise ValueError("need authorized_supports or an oracle")
        oracle = authorized_cover_oracle(authorized_supports)
    cfg = config or MergeConfig()

    initial = sorted(constraints, key=Constraint.sort_key)
    if authorized_supports is not None:
        for s in authorized_supports:
            if not admits(initial, s):
                raise ValueError("input constraints already forbid an authorized support")
    for s in border_supports:
        if admits(initial, s):
            raise ValueError("input constraints fail to forbid a border support")
    baseline = tuple(admits(initial, s) for s in other_forbidden_supports)

    run = _Run(working=list(initial), oracle=oracle, config=cfg)
    _sweep(run)
    while True:
        move = _find_fold(run) or _find_sibling(run)
        if move is None:
            break
        kind, inputs, output, evidence, signature = move
        candidate = [c for c in run.working if c not in inputs] + [output]
        ok, why = _gate(
            candidate, initial, authorized_supports, border_supports,
            other_forbidden_supports, baseline,
        )
        step = MergeStep(
            kind=kind,
            inputs=tuple(sorted(inputs, key=Constraint.sort_key)),
            output=output,
            evidence=tuple(evidence),
            accepted=ok,
            note=why,
        )
        run.steps.append(step)
        if not ok:
            run.refused.add(signature)
            continue
        run.working = sorted(candidate, key=Constraint.sort_key)
        _sweep(run)

    final = tuple(sorted(run.working, key=Constraint.sort_key))
    return final, MergeTrace(steps=tuple(run.steps))


def _gate(
    candidate: Sequence[Constraint],
    initial: Sequence[Constraint],
    authorized_supports: Sequence[PlaceSet] | None,
    border_supports: Sequence[PlaceSet],
    other_forbidden_supports: Sequence[PlaceSet],
    baseline: tuple[bool, ...],
) -> tuple[bool, str]:
    if authorized_supports is not None:
        for s in authorized_supports:
            if not admits(candidate, s):
                return False, "rolled back: would forbid an authorized marking"
    for s in border_supports:
        if admits(candidate, s):
            return False, "rolled back: would stop forbidding a border marking"
    for s, was_admitted in zip(other_forbidden_supports, baseline):
        if admits(candidate, s) != was_admitted:
            return False, "rolled back: would reclassify a non-border forbidden marking"
    return True, ""


def _sweep(run: _Run) -> None:
    """Drop constraints dominated by a kept one; classification never changes."""
    kept: list[Constraint] = []
    order = sorted(run.working, key=lambda c: (-len(c.support), c.sort_key()))
    for c in order:
        winner = next((k for k in kept if k.subsumes(c)), None)
        if winner is None:
            kept.append(c)
        else:
            run.steps.append(
                MergeStep(kind="subsume", inputs=(c,), output=None, by=winner)
            )
    run.working = sorted(kept, key=Constraint.sort_key)


def _find_fold(run: _Run):
    """First applicable head fold, scanning anchors in canonical order.

    For each anchor constraint and each of its places as the head, the
    other constraints sharing the remaining tail contribute candidate
    heads.  The fold takes the anchor's head plus every further head
    that is pairwise exclusive with all heads picked so far, in place
    order; heads that fail the pairwise test are simply left out rather
    than blocking the whole group.
    """
    units = [c for c in run.working if c.is_unit]
    groups: dict[tuple[PlaceSet, int], list[int]] = {}
    for c in units:
        for h in c.support:
            groups.setdefault((c.support - {h}, c.bound), []).append(h)
    for anchor in units:
        for h in sorted(anchor.support):
            tail = anchor.support - {h}
            group = sorted(groups[(tail, anchor.bound)])
            if len(group) < 2:
                continue
            picked = [h]
            for other in group:
                if other != h and all(
                    not run.oracle(frozenset((other, q))) for q in picked
                ):
                    picked.append(other)
            if len(picked) < 2:
                continue
            heads = tuple(sorted(picked))
            signature = ("fold", tail, anchor.bound, heads)
            if signature in run.refused:
                continue
            evidence: Evidence = []
            merged = fold_exclusive_heads(
                frozenset(heads), tail, anchor.bound, run.working, run.oracle, evidence
            )
            if merged is None:  # pragma: no cover - picked heads are pairwise exclusive
                run.refused.add(signature)
                continue
            by_support = {c.support: c for c in units if c.bound == anchor.bound}
            inputs = [by_support[frozenset({x}) | tail] for x in heads]
            return "fold-heads", inputs, merged, evidence, signature
    return None


def _find_sibling(run: _Run):
    """First applicable sibling merge or absorption over ordered pairs."""
    units = [c for c in run.working if c.is_unit]
    for c1 in units:
        n = c1.bound
        if len(c1.support) < n + 1:
            continue
        for c2 in units:
            if c2 is c1 or c2.bound != n or len(c2.support) != n + 1:
                continue
            if c1.support == c2.support or len(c1.support & c2.support) != n:
                continue
            signature = ("sib", c1.sort_key(), c2.sort_key())
            if signature in run.refused:
                continue
            evidence: Evidence = []
            if len(c1.support) == n + 1:
                kind = "merge-siblings"
                merged = merge_sibling_pair(c1, c2, run.oracle, evidence)
            else:
                kind = "absorb-sibling"
                try:
                    merged = absorb_sibling(
                        c1, c2, run.oracle,
                        subset_cap=run.config.subset_cap, evidence=evidence,
                    )
                except CombinatorialLimit as exc:
                    run.refused.add(signature)
                    run.steps.append(
                        MergeStep(
                            kind=kind, inputs=(c1, c2), output=None,
                            accepted=False, note=str(exc),
                        )
                    )
                    continue
            if merged is None:
                run.refused.add(signature)
                continue
            return kind, [c1, c2], merged, evidence, signature
    return None
