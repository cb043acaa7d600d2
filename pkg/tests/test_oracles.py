"""Sanity checks for the brute-force oracles on hand-computed cases.

If these fail, every comparison against an oracle is meaningless, so
they pin down the oracles' own behavior first.
"""

from __future__ import annotations

from conftest import mutex4_net
from oracles import (
    brute_minimal_separators,
    brute_minimum_cover_size,
    classify,
    constrained_reach_supports,
    covered,
    nonempty_subsets,
    subset_cells,
)
from pnsup.constraints import Constraint


def test_nonempty_subsets_enumerates_the_lattice():
    assert nonempty_subsets({1, 2}) == [
        frozenset({1}),
        frozenset({2}),
        frozenset({1, 2}),
    ]


def test_covered_is_a_containment_scan():
    authorized = [frozenset({0, 1, 2})]
    assert covered(frozenset({0, 2}), authorized)
    assert not covered(frozenset({0, 3}), authorized)


def test_brute_minimal_separators_on_mutex4_sets():
    # Singletons P2 and P4 are each inside an authorized support, so the
    # only separator for the border P2P4 is the pair itself.
    result = brute_minimal_separators(
        [frozenset({1, 3})],
        [frozenset({0, 2}), frozenset({1, 2}), frozenset({0, 3})],
    )
    assert result == [frozenset({1, 3})]


def test_brute_minimum_cover_size_finds_the_optimum():
    # Rows: {0}, {1}, {0,1}; one row suffices.
    cells = [[True, False], [False, True], [True, True]]
    assert brute_minimum_cover_size(cells, 2) == 1
    assert brute_minimum_cover_size([[True, False]], 2) is None
    assert brute_minimum_cover_size([], 0) == 0


def test_subset_cells_is_elementwise_containment():
    cells = subset_cells(
        [frozenset({0}), frozenset({0, 1})],
        [frozenset({0, 2}), frozenset({0, 1, 2})],
    )
    assert cells == [[True, True], [False, True]]


def test_constrained_reach_blocks_violating_results():
    net = mutex4_net()
    forbid_both = [Constraint.unit({1, 3}, 1)]
    reached = constrained_reach_supports(net, forbid_both)
    assert reached == {
        frozenset({0, 2}),
        frozenset({1, 2}),
        frozenset({0, 3}),
    }
    # Without constraints the full four-state space comes back.
    assert len(constrained_reach_supports(net, [])) == 4


def test_classify_evaluates_unit_sums():
    c = Constraint.unit({1, 3}, 1)
    assert classify([c], frozenset({1}))
    assert not classify([c], frozenset({1, 3}))
