"""Geometric tracking of word-meaning drift across ordered text slices.

Each slice embeds its tokens on the unit sphere; caps around the tokens
form a cover whose nerve is the slice's shape.  Restriction maps connect
consecutive slices, and a small path calculus decides, per tracked word,
whether its meaning carries forward or ruptures.  Decisions accumulate in
append-only ledgers and serialise canonically.
"""

from .calculus import (
    AdmissibilityPolicy,
    CarryWitness,
    FailedAttempt,
    Ledger,
    LedgerEntry,
    PathAttempt,
    RupturePayload,
    admissibility_violation,
    compose_carries,
    edge_theta_max,
    empty_ledger,
    enumerate_attempts,
    find_carry,
    ledger_append,
    ledger_to_dict,
    unit_carry,
)
from .errors import (
    AnchorMismatchError,
    CapRadiusTooLargeError,
    CoverMismatchError,
    DegenerateDataError,
    DimensionMismatchError,
    DriftError,
    EmptyInputError,
    FaceActuallyPresentError,
    TimeOrderViolationError,
    TraceFormatError,
    UnknownTokenError,
    UnknownVertexError,
    ZeroVectorError,
)
from .evolving import EvolvingText, TrackedAnchor, build_evolving_text, restrict, track
from .geometry import (
    SphericalCap,
    UnitVector,
    angular_distance,
    caps_intersect,
    good_cover_check,
    nearest_rank_quantile,
    normalize,
    quantile_radius,
)
from .nerve import OpenHornTag, SliceComplex, build_nerve, ex_infty_close, open_horn_for
from .pipeline import (
    RunBundle,
    RunConfig,
    export_pca,
    run_pipeline,
    write_run_outputs,
)
from .slices import CapCover, SliceSample, TokenOccurrence, build_cover, incidence
from .trace import TraceFile, canonical_json, load_trace, parse_trace, serialize_trace

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityPolicy",
    "AnchorMismatchError",
    "CapCover",
    "CapRadiusTooLargeError",
    "CarryWitness",
    "CoverMismatchError",
    "DegenerateDataError",
    "DimensionMismatchError",
    "DriftError",
    "EmptyInputError",
    "EvolvingText",
    "FaceActuallyPresentError",
    "FailedAttempt",
    "Ledger",
    "LedgerEntry",
    "OpenHornTag",
    "PathAttempt",
    "RunBundle",
    "RunConfig",
    "RupturePayload",
    "SliceComplex",
    "SliceSample",
    "SphericalCap",
    "TimeOrderViolationError",
    "TraceFile",
    "TraceFormatError",
    "TrackedAnchor",
    "TokenOccurrence",
    "UnitVector",
    "UnknownTokenError",
    "UnknownVertexError",
    "ZeroVectorError",
    "admissibility_violation",
    "angular_distance",
    "build_cover",
    "build_evolving_text",
    "build_nerve",
    "canonical_json",
    "caps_intersect",
    "compose_carries",
    "edge_theta_max",
    "empty_ledger",
    "enumerate_attempts",
    "ex_infty_close",
    "export_pca",
    "find_carry",
    "good_cover_check",
    "incidence",
    "ledger_append",
    "ledger_to_dict",
    "load_trace",
    "nearest_rank_quantile",
    "normalize",
    "open_horn_for",
    "parse_trace",
    "quantile_radius",
    "restrict",
    "run_pipeline",
    "serialize_trace",
    "track",
    "unit_carry",
    "write_run_outputs",
]
