"""Exception types raised across the toolkit.

Every error carries enough context to identify the offending object
(place, transition, marking, or constraint) without the caller having
to re-run the failing operation.
"""

from __future__ import annotations


class PnsupError(Exception):
    """Base class for all toolkit errors."""


class NotEnabled(PnsupError):
    """A transition was fired from a marking that does not enable it."""

    def __init__(self, transition: str, marking_label: str):
        self.transition = transition
        self.marking_label = marking_label
        super().__init__(f"transition {transition!r} is not enabled at {marking_label}")


class SafenessViolation(PnsupError):
    """Firing a transition would put more than one token on a place."""

    def __init__(self, place: str, transition: str, marking_label: str):
        self.place = place
        self.transition = transition
        self.marking_label = marking_label
        super().__init__(
            f"firing {transition!r} at {marking_label} puts a second token on {place!r}"
        )


class StateLimitExceeded(PnsupError):
    """Exploration hit the configured state cap before completing."""

    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"reachability exploration exceeded the state limit of {limit}")


class EmptySupport(PnsupError):
    """The support of an all-zero marking was requested."""

    def __init__(self) -> None:
        super().__init__("marking has no marked place")


class UnknownPlace(PnsupError):
    """A place identifier or index does not exist in the net."""

    def __init__(self, place: object):
        self.place = place
        super().__init__(f"unknown place: {place!r}")


class DuplicateId(PnsupError):
    """Two nodes in a net document share an identifier."""

    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"duplicate identifier: {node_id!r}")


class NonUnitWeight(PnsupError):
    """An arc in an input document carries a weight other than one."""

    def __init__(self, src: str, dst: str, weight: object):
        self.src = src
        self.dst = dst
        self.weight = weight
        super().__init__(f"arc {src!r} -> {dst!r} has non-unit weight {weight!r}")


class ParseError(PnsupError):
    """A document is structurally invalid."""


class InitialStateForbidden(PnsupError):
    """The initial marking itself falls in the forbidden set."""

    def __init__(self, marking_label: str):
        self.marking_label = marking_label
        super().__init__(f"initial marking {marking_label} is forbidden; no supervisor exists")


class Uncoverable(PnsupError):
    """A border marking admits no separating place set.

    Raised when every subset of the marking's support is also contained
    in some authorized support, so no at-most-k constraint can forbid
    the marking without also forbidding an authorized one.
    """

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"no separating place set exists for {label}")


class CombinatorialLimit(PnsupError):
    """A merge rule would need to test more subsets than the configured cap."""

    def __init__(self, required: int, cap: int):
        self.required = required
        self.cap = cap
        super().__init__(f"merge check needs {required} subset tests, cap is {cap}")


class InitialViolation(PnsupError):
    """The initial marking violates a constraint handed to the synthesizer."""

    def __init__(self, constraint_label: str, slack: int):
        self.constraint_label = constraint_label
        self.slack = slack
        super().__init__(
            f"initial marking violates {constraint_label} (token balance {slack})"
        )
