"""Access to the bundled example documents.

The fixtures live as JSON files inside this subpackage so the tests and
the CLI documentation can point at real, loadable inputs:

- ``mutex4.net.json`` / ``mutex4.spec.json``: two looping processes of
  two places each, entry transitions controllable, exits not; the spec
  forbids both processes being in their second place at once.
- ``borders13.json``: a net-free marking-sets document with thirteen
  border supports, ten candidate over-states, and the reference
  tabulation they were transcribed from (see its ``notes``).
- ``small_merge.json``: a four-border merging exercise whose authorized
  set blocks some merges and admits others (see its ``notes``).
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..net import PetriNet
from ..netio import MarkingSets, load_marking_sets, load_net, load_spec
from ..partition import ForbiddenSpec

__all__ = [
    "fixture_path",
    "load_fixture",
    "mutex4",
    "border_tabulation",
    "merge_example",
]


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture (they ship as plain files)."""
    return Path(str(resources.files(__name__).joinpath(name)))


def load_fixture(name: str) -> dict:
    return json.loads(fixture_path(name).read_text())


def mutex4() -> tuple[PetriNet, ForbiddenSpec]:
    net = load_net(load_fixture("mutex4.net.json"))
    return net, load_spec(load_fixture("mutex4.spec.json"), net)


def border_tabulation() -> MarkingSets:
    return load_marking_sets(load_fixture("borders13.json"))


def merge_example() -> MarkingSets:
    return load_marking_sets(load_fixture("small_merge.json"))
