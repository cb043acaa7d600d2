"""Supervisory controller synthesis for safe Petri nets.

From a safe net and a set of forbidden markings, this package computes
the reachable state space, splits it into authorized, forbidden, and
border states under uncontrollability, compresses the border into few
linear constraints, merges those constraints where the authorized states
allow it, and realizes the result as monitor places whose closed-loop
behavior is then verified exhaustively.
"""

from .constraints import Constraint, admits, admits_all, forbids_each
from .errors import (
    CombinatorialLimit,
    DuplicateId,
    EmptySupport,
    InitialStateForbidden,
    InitialViolation,
    NonUnitWeight,
    NotEnabled,
    ParseError,
    PnsupError,
    SafenessViolation,
    StateLimitExceeded,
    Uncoverable,
    UnknownPlace,
)
from .merge import (
    MergeConfig,
    MergeStep,
    MergeTrace,
    absorb_sibling,
    extend_mutual_exclusion,
    fold_exclusive_heads,
    merge_fixpoint,
    merge_sibling_pair,
    mutual_exclusion_pair,
    replay_trace,
)
from .monitor import (
    AdmissibilityWarning,
    ConstraintMatrix,
    ControlledNet,
    ControlPlace,
    VerificationReport,
    admissibility_check,
    closed_loop_verify,
    synthesize,
    to_matrix,
)
from .net import (
    DEFAULT_STATE_LIMIT,
    Marking,
    PetriNet,
    PlaceSet,
    ReachabilityGraph,
    enabled,
    fire,
    marking_from_support,
    reach,
    support,
    support_label,
    verify_partial_invariant,
    verify_place_invariant,
)
from .netio import (
    MarkingSets,
    load_constraints,
    load_marking_sets,
    load_net,
    load_spec,
    save_constraints,
    save_controlled,
    save_net,
    save_spec,
)
from .partition import (
    ForbiddenSpec,
    Partition,
    authorized_reachable,
    initial_forbidden,
    partition,
    supports_of,
    uncontrollable_closure,
)
from .pipeline import PipelineConfig, PipelineReport, run_pipeline
from .reduction import (
    CoverSelection,
    CoverTable,
    authorized_cover_oracle,
    covered_by_authorized,
    is_overstate_of,
    marking_constraint,
    minimal_overstates,
    overstate_constraint,
    select_cover,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # net
    "PetriNet",
    "ReachabilityGraph",
    "Marking",
    "PlaceSet",
    "DEFAULT_STATE_LIMIT",
    "enabled",
    "fire",
    "reach",
    "support",
    "support_label",
    "marking_from_support",
    "verify_place_invariant",
    "verify_partial_invariant",
    # partition
    "ForbiddenSpec",
    "Partition",
    "initial_forbidden",
    "uncontrollable_closure",
    "partition",
    "authorized_reachable",
    "supports_of",
    # constraints
    "Constraint",
    "admits",
    "admits_all",
    "forbids_each",
    # reduction
    "is_overstate_of",
    "covered_by_authorized",
    "authorized_cover_oracle",
    "minimal_overstates",
    "CoverTable",
    "CoverSelection",
    "select_cover",
    "overstate_constraint",
    "marking_constraint",
    # merge
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
    # monitor
    "ConstraintMatrix",
    "ControlPlace",
    "ControlledNet",
    "AdmissibilityWarning",
    "VerificationReport",
    "to_matrix",
    "synthesize",
    "admissibility_check",
    "closed_loop_verify",
    # io
    "load_net",
    "save_net",
    "load_spec",
    "save_spec",
    "load_constraints",
    "save_constraints",
    "save_controlled",
    "MarkingSets",
    "load_marking_sets",
    # pipeline
    "PipelineConfig",
    "PipelineReport",
    "run_pipeline",
    # errors
    "PnsupError",
    "NotEnabled",
    "SafenessViolation",
    "StateLimitExceeded",
    "EmptySupport",
    "UnknownPlace",
    "DuplicateId",
    "NonUnitWeight",
    "ParseError",
    "InitialStateForbidden",
    "Uncoverable",
    "CombinatorialLimit",
    "InitialViolation",
]
