"""Carry and rupture: did a word's earlier sense survive into a later slice?

Given an anchor occurrence at time tau and the same surface at a later
tau', the later occurrence is pulled back to tau through the restriction
maps and a bounded search runs inside tau's skeleton for an admissible
walk from the anchor to that echo.  Success yields a carry witness (the
actual walk); failure yields a rupture payload that keeps every failed
attempt together with the violated constraint and a tag naming the face
whose absence blocked it.  All of it lands in an append-only ledger keyed
by the anchor, so later successes never erase earlier failures.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AnchorMismatchError,
    TimeOrderViolationError,
    UnknownVertexError,
)
from .evolving import EvolvingText, TrackedAnchor, restrict, track
from .geometry import angular_distance, nearest_rank_quantile
from .nerve import (
    DASHED,
    MISSING_EDGE,
    MISSING_TRIANGLE,
    OpenHornTag,
    SliceComplex,
    unwitnessed_detour_apex,
)

ABSENT = "absent"

NO_EDGE = "no_edge"
TOO_MANY_HOPS = "too_many_hops"
STEP_ANGLE_EXCEEDED = "step_angle_exceeded"
TURNING_ANGLE_EXCEEDED = "turning_angle_exceeded"

CARRY = "carry"
RUPTURE = "rupture"

# Default cap on how many failing attempts a rupture payload records.
MAX_LOGGED_ATTEMPTS = 64


@dataclass(frozen=True)
class AdmissibilityPolicy:
    """What counts as a legitimate step-by-step connection.

    max_hops bounds walk length; step_angle_quantile sets the per-slice
    step bound theta_max as that nearest-rank quantile of the slice's edge
    angles (dashed edges included whenever they are walkable);
    turning_angle_max bounds the direction change at interior vertices.
    step_angle_max, when set, overrides the quantile rule with an absolute
    theta_max in radians.
    """

    max_hops: int = 1
    step_angle_quantile: float = 0.2
    turning_angle_max: float = math.pi / 2
    allow_dashed_steps: bool = True
    step_angle_max: float | None = None

    def __post_init__(self) -> None:
        if self.max_hops < 0:
            raise ValueError("max_hops must be >= 0")
        if not 0.0 < self.step_angle_quantile <= 1.0:
            raise ValueError("step_angle_quantile must be in (0, 1]")
        if not 0.0 < self.turning_angle_max <= math.pi:
            raise ValueError("turning_angle_max must be in (0, pi]")
        if self.step_angle_max is not None and self.step_angle_max <= 0.0:
            raise ValueError("step_angle_max must be positive when given")


@dataclass(frozen=True)
class PathStep:
    """One edge traversal: the edge's kind and its angular length."""

    kind: str
    angle: float


@dataclass(frozen=True)
class PathAttempt:
    """A candidate walk in a slice's skeleton, with its measurements.

    vertices runs from the anchor's token to the back-propagated echo;
    steps[i] covers (vertices[i], vertices[i+1]); turning_angles[k] is the
    ambient direction change at interior vertex vertices[k+1].
    """

    anchor_time: int
    vertices: tuple[int, ...]
    steps: tuple[PathStep, ...]
    turning_angles: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise ValueError("an attempt needs at least one vertex")
        if len(self.steps) != len(self.vertices) - 1:
            raise ValueError("steps must cover consecutive vertex pairs")
        expected_turns = max(0, len(self.vertices) - 2)
        if len(self.turning_angles) != expected_turns:
            raise ValueError("one turning angle per interior vertex")

    @property
    def hop_count(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class CarryWitness:
    """An admissible walk certifying that the sense carried over."""

    anchor: TrackedAnchor
    echo: TrackedAnchor
    chain: PathAttempt
    hop_count: int


@dataclass(frozen=True)
class FailedAttempt:
    attempt: PathAttempt
    violation: str
    horn: OpenHornTag


@dataclass(frozen=True)
class RupturePayload:
    """Every enumerated attempt failed; here is each one with its reason."""

    anchor: TrackedAnchor
    candidate: TrackedAnchor
    failed_attempts: tuple[FailedAttempt, ...]


@dataclass(frozen=True)
class Decoration:
    """A key/value annotation attached to an occurrence."""

    key: str
    value: str

    def __post_init__(self) -> None:
        if not self.key:
            raise ValueError("decoration key must be nonempty")


@dataclass(frozen=True)
class TransportProvenance:
    """Where transported decorations came from and how far they travelled."""

    surface: str
    anchor_time: int
    hop_count: int


@dataclass(frozen=True)
class TransportedDecorations:
    """Decorations moved along a carry: content unchanged, origin recorded."""

    items: tuple[Decoration, ...]
    provenance: TransportProvenance


@dataclass(frozen=True)
class LedgerEntry:
    timestamp: int
    kind: str
    payload: CarryWitness | RupturePayload


@dataclass(frozen=True)
class Ledger:
    """Append-only event record for one (surface, anchor time) key.

    Timestamps are a per-ledger monotone counter, not wall-clock time, so
    two runs over the same data produce identical ledgers.
    """

    surface: str
    anchor_time: int
    entries: tuple[LedgerEntry, ...] = ()


def empty_ledger(surface: str, anchor_time: int) -> Ledger:
    return Ledger(surface=surface, anchor_time=anchor_time)


def ledger_append(
    ledger: Ledger, payload: CarryWitness | RupturePayload
) -> Ledger:
    """Return a new ledger with the event appended; the old value is unchanged.

    The payload's anchor must match the ledger key.
    """
    anchor = payload.anchor
    if (anchor.surface, anchor.time_index) != (ledger.surface, ledger.anchor_time):
        raise AnchorMismatchError(
            f"entry anchored at {(anchor.surface, anchor.time_index)!r} does not "
            f"belong to ledger {(ledger.surface, ledger.anchor_time)!r}"
        )
    kind = CARRY if isinstance(payload, CarryWitness) else RUPTURE
    next_ts = ledger.entries[-1].timestamp + 1 if ledger.entries else 0
    entry = LedgerEntry(timestamp=next_ts, kind=kind, payload=payload)
    return Ledger(
        surface=ledger.surface,
        anchor_time=ledger.anchor_time,
        entries=ledger.entries + (entry,),
    )


def edge_theta_max(complex_: SliceComplex, policy: AdmissibilityPolicy) -> float:
    """Resolve the per-slice step bound theta_max for this policy.

    Quantile rule: nearest-rank step_angle_quantile over the slice's edge
    angles, dashed included iff dashed steps are walkable.  A slice with
    no edges gets 0.0, under which no positive-length step can pass.
    """
    if policy.step_angle_max is not None:
        return policy.step_angle_max
    edges = set(complex_.solid_edges)
    if policy.allow_dashed_steps:
        edges |= complex_.dashed_edges
    if not edges:
        return 0.0
    angles = [complex_.edge_angles[e] for e in edges]
    return nearest_rank_quantile(angles, policy.step_angle_quantile)


def build_attempt(
    complex_: SliceComplex, vertices: Sequence[int]
) -> PathAttempt:
    """Measure a vertex walk against a complex: edge kinds, step and
    turning angles.  Pairs that are not edges get kind "absent"; their
    angular length is still recorded."""
    index = {v: i for i, v in enumerate(complex_.vertices)}
    for v in vertices:
        if v not in index:
            raise UnknownVertexError(f"vertex {v} not in complex")
    steps = []
    for a, b in zip(vertices, vertices[1:]):
        kind = complex_.edge_kind(a, b) or ABSENT
        if kind == ABSENT:
            angle = angular_distance(
                complex_.vectors[index[a]], complex_.vectors[index[b]]
            )
        else:
            angle = complex_.edge_angle(a, b)
        steps.append(PathStep(kind=kind, angle=float(angle)))
    turns = _turning_angles(complex_, index, vertices)
    return PathAttempt(
        anchor_time=complex_.time_index,
        vertices=tuple(vertices),
        steps=tuple(steps),
        turning_angles=turns,
    )


def _turning_angles(
    complex_: SliceComplex, index: dict[int, int], vertices: Sequence[int]
) -> tuple[float, ...]:
    # Direction change between successive displacement vectors of the
    # endpoint embeddings, measured in ambient coordinates.  A zero
    # displacement (duplicate embeddings) has no direction, so no turn.
    out = []
    for k in range(1, len(vertices) - 1):
        prev_v = complex_.vectors[index[vertices[k - 1]]].coords
        here = complex_.vectors[index[vertices[k]]].coords
        next_v = complex_.vectors[index[vertices[k + 1]]].coords
        d1 = here - prev_v
        d2 = next_v - here
        n1 = float(np.linalg.norm(d1))
        n2 = float(np.linalg.norm(d2))
        if n1 <= 1e-12 or n2 <= 1e-12:
            out.append(0.0)
            continue
        cos_turn = float(np.dot(d1, d2) / (n1 * n2))
        out.append(math.acos(min(1.0, max(-1.0, cos_turn))))
    return tuple(out)


def enumerate_attempts(
    complex_: SliceComplex,
    start: int,
    goal: int,
    policy: AdmissibilityPolicy,
) -> list[PathAttempt]:
    """All simple walks start -> goal of length <= max(max_hops, 1).

    Walks traverse solid edges, plus dashed ones when the policy allows.
    Enumeration is breadth-first with neighbours visited in ascending
    token id, so the order is deterministic and shorter walks come first.
    When no walk reaches the goal, the single straight-line pair is
    returned with its edge marked absent, so a rupture always has at
    least one attempt to log.  The lower bound of 1 on the walk length
    keeps that true even under max_hops = 0.
    """
    vertex_set = set(complex_.vertices)
    if start not in vertex_set:
        raise UnknownVertexError(f"start vertex {start} not in complex")
    if goal not in vertex_set:
        raise UnknownVertexError(f"goal vertex {goal} not in complex")

    adjacency: dict[int, tuple[int, ...]] = {
        v: complex_.neighbors(v, include_dashed=policy.allow_dashed_steps)
        for v in complex_.vertices
    }
    bound = max(policy.max_hops, 1)
    walks: list[tuple[int, ...]] = []
    queue: deque[tuple[int, ...]] = deque([(start,)])
    while queue:
        path = queue.popleft()
        if path[-1] == goal:
            walks.append(path)
            continue  # a simple walk cannot leave and revisit the goal
        if len(path) - 1 >= bound:
            continue
        for nb in adjacency[path[-1]]:
            if nb not in path:
                queue.append(path + (nb,))
    if not walks:
        walks = [(start, goal)]
    return [build_attempt(complex_, walk) for walk in walks]


def admissibility_violation(
    attempt: PathAttempt, policy: AdmissibilityPolicy, theta_max: float
) -> str | None:
    """None when the attempt is admissible, else the first violated
    constraint in the fixed order: no_edge, too_many_hops,
    step_angle_exceeded, turning_angle_exceeded."""
    violation, _ = _first_violation(attempt, policy, theta_max)
    return violation


def _first_violation(
    attempt: PathAttempt, policy: AdmissibilityPolicy, theta_max: float
) -> tuple[str | None, int]:
    # Constraints are evaluated whole-walk in a fixed order; alongside the
    # violation we return the step index a horn tag should point at.
    for i, step in enumerate(attempt.steps):
        if step.kind == ABSENT:
            return NO_EDGE, i
        if step.kind == DASHED and not policy.allow_dashed_steps:
            # Dashed edges are not part of this policy's graph at all.
            return NO_EDGE, i
    if attempt.hop_count > policy.max_hops:
        # The first step beyond the hop budget.
        return TOO_MANY_HOPS, policy.max_hops
    for i, step in enumerate(attempt.steps):
        if not step.angle < theta_max:
            return STEP_ANGLE_EXCEEDED, i
    for k, angle in enumerate(attempt.turning_angles):
        if angle > policy.turning_angle_max:
            # The turn happens at interior vertex k+1, entering step k+1.
            return TURNING_ANGLE_EXCEEDED, k + 1
    return None, -1


def _horn_for_failure(
    complex_: SliceComplex, attempt: PathAttempt, fail_step: int
) -> OpenHornTag:
    # Total version of open_horn_for: a rupture logs every failed attempt
    # and each needs a tag, including attempts rejected purely on metric
    # grounds while every face they touch exists.
    vertices = attempt.vertices
    for i in range(len(vertices) - 1):
        if complex_.edge_kind(vertices[i], vertices[i + 1]) is None:
            return OpenHornTag(
                MISSING_EDGE, _pair(vertices[i], vertices[i + 1]), i
            )
    order = [fail_step] + [
        i for i in range(len(vertices) - 1) if i != fail_step
    ]
    for i in order:
        apex = unwitnessed_detour_apex(complex_, vertices[i], vertices[i + 1])
        if apex is not None:
            boundary = tuple(sorted((vertices[i], apex, vertices[i + 1])))
            return OpenHornTag(MISSING_TRIANGLE, boundary, i)
    # Metric-only failure: the step's edge exists and no detour offers an
    # unfilled triangle, so record the degenerate form (no 2-face over the
    # step edge to point at).
    return OpenHornTag(
        MISSING_TRIANGLE, _pair(vertices[fail_step], vertices[fail_step + 1]),
        fail_step,
    )


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


def find_carry(
    et: EvolvingText,
    anchor: TrackedAnchor,
    later_time: int,
    policy: AdmissibilityPolicy,
    max_logged_attempts: int = MAX_LOGGED_ATTEMPTS,
) -> CarryWitness | RupturePayload | None:
    """Decide carry vs rupture for one anchor against a later slice.

    Returns None when the surface does not occur at later_time
    (disappearance: nothing to decide, nothing to log).  Otherwise the
    later latest-use occurrence is restricted back to the anchor's slice
    and attempts are checked in enumeration order; the first admissible
    one wins, which under breadth-first order means minimal hop count.
    """
    if later_time < anchor.time_index:
        raise TimeOrderViolationError(
            f"anchor at {anchor.time_index} cannot be checked against "
            f"earlier time {later_time}"
        )
    echoes = [
        a for a in track(et, anchor.surface) if a.time_index == later_time
    ]
    if not echoes:
        return None
    echo = echoes[0]
    goal = restrict(et, later_time, anchor.time_index, echo.token_id)
    complex_ = et.complex_at(anchor.time_index)
    theta_max = edge_theta_max(complex_, policy)
    failures: list[FailedAttempt] = []
    for attempt in enumerate_attempts(complex_, anchor.token_id, goal, policy):
        violation, fail_step = _first_violation(attempt, policy, theta_max)
        if violation is None:
            return CarryWitness(
                anchor=anchor,
                echo=echo,
                chain=attempt,
                hop_count=attempt.hop_count,
            )
        if len(failures) < max_logged_attempts:
            failures.append(
                FailedAttempt(
                    attempt=attempt,
                    violation=violation,
                    horn=_horn_for_failure(complex_, attempt, fail_step),
                )
            )
    return RupturePayload(
        anchor=anchor, candidate=echo, failed_attempts=tuple(failures)
    )


def unit_carry(anchor: TrackedAnchor, et: EvolvingText) -> CarryWitness:
    """The trivial carry of an anchor onto itself: empty walk, zero hops."""
    complex_ = et.complex_at(anchor.time_index)
    chain = build_attempt(complex_, [anchor.token_id])
    return CarryWitness(anchor=anchor, echo=anchor, chain=chain, hop_count=0)


def compose_carries(
    k01: CarryWitness, k12: CarryWitness, et: EvolvingText
) -> CarryWitness:
    """Chain two carries across adjacent spans into one composite witness.

    k01 carries tau0 -> tau1 and k12 carries tau1 -> tau2; k01's echo must
    be exactly k12's anchor.  The composite chain is k01's walk followed by
    the vertex-wise image of k12's walk under restriction to tau0, with
    collapsed steps (consecutive equal images) dropped.  Admissibility of
    the composite is not asserted; it is a composite witness, and its
    steps are re-measured against tau0's skeleton as they stand.
    """
    if k01.echo != k12.anchor:
        raise AnchorMismatchError(
            f"cannot compose: {k01.echo!r} does not match {k12.anchor!r}"
        )
    t0 = k01.anchor.time_index
    t1 = k12.anchor.time_index
    mapped = [
        restrict(et, t1, t0, v) for v in k12.chain.vertices
    ]
    vertices = list(k01.chain.vertices)
    for v in mapped[1:]:
        if v != vertices[-1]:
            vertices.append(v)
    # The join holds by construction: k01's walk ends at the restriction
    # of its echo, which is the restriction of k12's anchor, i.e. mapped[0].
    if mapped and mapped[0] != k01.chain.vertices[-1]:
        raise AnchorMismatchError("restriction image does not join the chains")
    chain = build_attempt(et.complex_at(t0), vertices)
    return CarryWitness(
        anchor=k01.anchor,
        echo=k12.echo,
        chain=chain,
        hop_count=chain.hop_count,
    )


def transport_decoration(
    decorations: Iterable[Decoration], carry: CarryWitness
) -> TransportedDecorations:
    """Move decorations along a carry without touching their content.

    The items come back verbatim (sorted for determinism) with a
    provenance record naming the carry's anchor and hop count.
    """
    items = tuple(sorted(set(decorations), key=lambda d: (d.key, d.value)))
    return TransportedDecorations(
        items=items,
        provenance=TransportProvenance(
            surface=carry.anchor.surface,
            anchor_time=carry.anchor.time_index,
            hop_count=carry.hop_count,
        ),
    )


# --- JSON views -----------------------------------------------------------
# The ledger schema is part of the package's external surface: sorted keys
# and a monotone integer "ts" per entry, so serialised ledgers are stable
# byte-for-byte and earlier entries never change when later ones arrive.


def anchor_to_dict(anchor: TrackedAnchor) -> dict:
    return {
        "surface": anchor.surface,
        "time": anchor.time_index,
        "token_id": anchor.token_id,
    }


def attempt_to_dict(attempt: PathAttempt) -> dict:
    return {
        "anchor_time": attempt.anchor_time,
        "steps": [
            {"angle": s.angle, "kind": s.kind} for s in attempt.steps
        ],
        "turning_angles": list(attempt.turning_angles),
        "vertices": list(attempt.vertices),
    }


def horn_to_dict(horn: OpenHornTag) -> dict:
    return {
        "attempt_step": horn.attempt_step,
        "boundary": list(horn.boundary),
        "kind": horn.kind,
    }


def payload_to_dict(payload: CarryWitness | RupturePayload) -> dict:
    if isinstance(payload, CarryWitness):
        return {
            "anchor": anchor_to_dict(payload.anchor),
            "chain": attempt_to_dict(payload.chain),
            "echo": anchor_to_dict(payload.echo),
            "hop_count": payload.hop_count,
        }
    return {
        "anchor": anchor_to_dict(payload.anchor),
        "candidate": anchor_to_dict(payload.candidate),
        "failed_attempts": [
            {
                "attempt": attempt_to_dict(f.attempt),
                "horn": horn_to_dict(f.horn),
                "violation": f.violation,
            }
            for f in payload.failed_attempts
        ],
    }


def entry_to_dict(entry: LedgerEntry) -> dict:
    return {
        "kind": entry.kind,
        "payload": payload_to_dict(entry.payload),
        "ts": entry.timestamp,
    }


def ledger_to_dict(ledger: Ledger) -> dict:
    return {
        "anchor": {"surface": ledger.surface, "time": ledger.anchor_time},
        "entries": [entry_to_dict(e) for e in ledger.entries],
    }
