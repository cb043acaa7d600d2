"""Builders for the desk-scale nets most tests lean on.

These construct nets programmatically instead of loading the bundled
fixture documents, so the core tests stay meaningful even if the JSON
layer breaks.
"""

from __future__ import annotations

from pnsup.net import PetriNet
from pnsup.partition import ForbiddenSpec

# mutex4 place indices, used throughout: P1=0, P2=1, P3=2, P4=3.
P1, P2, P3, P4 = 0, 1, 2, 3


def mutex4_net(t1_controllable: bool = True) -> PetriNet:
    """Two independent two-phase loops; entries controllable, exits not."""
    return PetriNet.from_arcs(
        places=[("P1", 1), ("P2", 0), ("P3", 1), ("P4", 0)],
        transitions=[
            ("t1", t1_controllable),
            ("t2", False),
            ("t3", True),
            ("t4", False),
        ],
        arcs=[
            ("P1", "t1"),
            ("t1", "P2"),
            ("P2", "t2"),
            ("t2", "P1"),
            ("P3", "t3"),
            ("t3", "P4"),
            ("P4", "t4"),
            ("t4", "P3"),
        ],
    )


def mutex4_forbid_busy() -> ForbiddenSpec:
    """Forbid both loops sitting in their busy place at once."""
    return ForbiddenSpec(forbidden_markings=(frozenset({P2, P4}),))


def resource_net() -> PetriNet:
    """mutex4 plus a shared resource place P5 taken by t1/t3, returned by t2/t4."""
    return PetriNet.from_arcs(
        places=[("P1", 1), ("P2", 0), ("P3", 1), ("P4", 0), ("P5", 1)],
        transitions=[
            ("t1", True),
            ("t2", False),
            ("t3", True),
            ("t4", False),
        ],
        arcs=[
            ("P1", "t1"),
            ("P5", "t1"),
            ("t1", "P2"),
            ("P2", "t2"),
            ("t2", "P1"),
            ("t2", "P5"),
            ("P3", "t3"),
            ("P5", "t3"),
            ("t3", "P4"),
            ("P4", "t4"),
            ("t4", "P3"),
            ("t4", "P5"),
        ],
    )
