"""Forbidden-state specification, closure, and the three-way partition."""

from __future__ import annotations

import pytest

from conftest import mutex4_forbid_busy, mutex4_net
from pnsup.constraints import Constraint
from pnsup.errors import InitialStateForbidden, UnknownPlace
from pnsup.net import reach
from pnsup.partition import (
    ForbiddenSpec,
    authorized_reachable,
    initial_forbidden,
    marking_of,
    partition,
    supports_of,
    uncontrollable_closure,
)


def test_vacuous_specs_warn():
    with pytest.warns(UserWarning):
        ForbiddenSpec()
    # Anything non-empty is quiet.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ForbiddenSpec(forbid_deadlocks=True)
        mutex4_forbid_busy()


def test_initial_forbidden_matches_exact_supports():
    net = mutex4_net()
    graph = reach(net)
    assert initial_forbidden(graph, mutex4_forbid_busy()) == {3}
    # Subsets of a forbidden support do not match.
    spec = ForbiddenSpec(forbidden_markings=(frozenset({1}),))
    assert initial_forbidden(graph, spec) == frozenset()


def test_initial_forbidden_by_constraint_and_deadlock():
    net = mutex4_net()
    graph = reach(net)
    spec = ForbiddenSpec(
        forbidden_constraints=(Constraint.unit({1, 3}, 1),)
    )
    assert initial_forbidden(graph, spec) == {3}
    # mutex4 has no deadlock, so the flag alone forbids nothing.
    assert initial_forbidden(graph, ForbiddenSpec(forbid_deadlocks=True)) == frozenset()


def test_initial_forbidden_rejects_unknown_places():
    graph = reach(mutex4_net())
    spec = ForbiddenSpec(forbidden_markings=(frozenset({7}),))
    with pytest.raises(UnknownPlace):
        initial_forbidden(graph, spec)


def test_closure_stays_put_without_uncontrollable_entries():
    net = mutex4_net()
    graph = reach(net)
    # P2P4 is entered only by the controllable t1/t3.
    assert uncontrollable_closure(net, graph, frozenset({3})) == {3}
    assert uncontrollable_closure(net, graph, frozenset()) == frozenset()


def test_closure_walks_uncontrollable_edges_backwards():
    net = mutex4_net(t1_controllable=False)
    graph = reach(net)
    # P1P4 reaches P2P4 by firing the now uncontrollable t1.
    assert uncontrollable_closure(net, graph, frozenset({3})) == {2, 3}


def test_closure_is_monotone_in_the_seed():
    net = mutex4_net(t1_controllable=False)
    graph = reach(net)
    small = uncontrollable_closure(net, graph, frozenset({3}))
    large = uncontrollable_closure(net, graph, frozenset({1, 3}))
    assert small <= large


def test_partition_on_mutex4():
    net = mutex4_net()
    graph = reach(net)
    parts = partition(net, graph, mutex4_forbid_busy())
    assert parts.authorized == {0, 1, 2}
    assert parts.forbidden == {3}
    assert parts.border == {3}
    assert supports_of(graph, parts.border) == [frozenset({1, 3})]


def test_partition_with_uncontrollable_entry():
    # With t1 uncontrollable the closure pulls in P1P4, and both forbidden
    # states have a controllable edge from an authorized state: P1P3 -t3->
    # P1P4 and P2P3 -t3-> P2P4.  So both are border states.
    net = mutex4_net(t1_controllable=False)
    graph = reach(net)
    parts = partition(net, graph, mutex4_forbid_busy())
    assert supports_of(graph, parts.forbidden) == [
        frozenset({0, 3}),
        frozenset({1, 3}),
    ]
    assert parts.border == parts.forbidden
    assert parts.authorized == {0, 1}


def test_partition_of_the_empty_spec_authorizes_everything():
    net = mutex4_net()
    graph = reach(net)
    with pytest.warns(UserWarning):
        spec = ForbiddenSpec()
    parts = partition(net, graph, spec)
    assert parts.authorized == {0, 1, 2, 3}
    assert parts.forbidden == frozenset()
    assert parts.border == frozenset()


def test_partition_rejects_a_forbidden_initial_state():
    net = mutex4_net()
    graph = reach(net)
    spec = ForbiddenSpec(forbidden_markings=(frozenset({0, 2}),))
    with pytest.raises(InitialStateForbidden):
        partition(net, graph, spec)


def test_border_soundness_and_frontier_completeness():
    net = mutex4_net(t1_controllable=False)
    graph = reach(net)
    parts = partition(net, graph, mutex4_forbid_busy())
    for b in parts.border:
        assert any(
            net.controllable[t] and src in parts.authorized
            for t, src in graph.predecessors[b]
        )
    # No authorized state can slide into the forbidden set uncontrollably.
    for a in parts.authorized:
        for t, dst in graph.successors[a]:
            assert net.controllable[t] or dst in parts.authorized


def test_authorized_reachable_blocks_paths_through_forbidden_states():
    # P0 -t1-> F -t2-> X: X is authorized but only reachable through the
    # forbidden F, so an ideal supervisor never lets the plant get there.
    from pnsup.net import PetriNet

    net = PetriNet.from_arcs(
        places=[("P0", 1), ("F", 0), ("X", 0)],
        transitions=[("t1", True), ("t2", True)],
        arcs=[("P0", "t1"), ("t1", "F"), ("F", "t2"), ("t2", "X")],
    )
    graph = reach(net)
    spec = ForbiddenSpec(forbidden_markings=(frozenset({1}),))
    parts = partition(net, graph, spec)
    assert supports_of(graph, parts.forbidden) == [frozenset({1})]
    assert frozenset({2}) in set(supports_of(graph, parts.authorized))
    ideal = authorized_reachable(graph, parts.authorized)
    assert supports_of(graph, ideal) == [frozenset({0})]


def test_authorized_reachable_of_a_forbidden_initial_is_empty():
    graph = reach(mutex4_net())
    assert authorized_reachable(graph, frozenset({1, 2})) == frozenset()


def test_supports_of_tolerates_empty_markings():
    from pnsup.net import PetriNet

    net = PetriNet.from_arcs(
        places=[("P1", 1)],
        transitions=[("t1", True)],
        arcs=[("P1", "t1")],
    )
    graph = reach(net)
    assert supports_of(graph, frozenset({0, 1})) == [frozenset({0}), frozenset()]
    assert marking_of(graph, 1) == (0,)
