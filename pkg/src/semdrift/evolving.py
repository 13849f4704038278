"""A sequence of slices linked backwards by restriction maps.

Between consecutive slices the restriction map sends each later token to
its nearest earlier token in the angular metric (ties broken by lowest
token id).  Restriction over a longer span is defined as the composite of
the adjacent maps, so functoriality holds by construction: restricting
from tau'' to tau directly and via any intermediate tau' agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import TimeOrderViolationError, UnknownTokenError
from .geometry import cross_angle_matrix
from .nerve import SliceComplex
from .slices import SliceSample


@dataclass(frozen=True)
class TrackedAnchor:
    """The latest occurrence of a surface form in one slice."""

    surface: str
    time_index: int
    token_id: int


@dataclass(frozen=True, eq=False)
class EvolvingText:
    """Aligned samples and complexes, with one backward map per gap."""

    samples: tuple[SliceSample, ...]
    complexes: tuple[SliceComplex, ...]
    adjacent_restrictions: tuple[Mapping[int, int], ...]

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValueError("an evolving text needs at least one slice")
        if len(self.samples) != len(self.complexes):
            raise ValueError("samples and complexes are not aligned")
        if len(self.adjacent_restrictions) != len(self.samples) - 1:
            raise ValueError("need exactly one restriction map per adjacent gap")
        times = [s.time_index for s in self.samples]
        if times != sorted(set(times)):
            raise ValueError(f"time indices must be strictly increasing: {times!r}")
        for sample, complex_ in zip(self.samples, self.complexes):
            if sample.time_index != complex_.time_index:
                raise ValueError("sample/complex time indices disagree")

    def times(self) -> tuple[int, ...]:
        return tuple(s.time_index for s in self.samples)

    def position_of(self, time_index: int) -> int:
        forwards = {s.time_index: i for i, s in enumerate(self.samples)}
        try:
            return forwards[time_index]
        except KeyError:
            raise ValueError(f"no slice at time index {time_index}") from None

    def sample_at(self, time_index: int) -> SliceSample:
        return self.samples[self.position_of(time_index)]

    def complex_at(self, time_index: int) -> SliceComplex:
        return self.complexes[self.position_of(time_index)]


def build_evolving_text(
    samples: Sequence[SliceSample], complexes: Sequence[SliceComplex]
) -> EvolvingText:
    """Assemble an evolving text, computing the adjacent restriction maps.

    For each consecutive pair, every later token maps to the earlier token
    minimising angular distance; on ties the lowest earlier token id wins.
    """
    samples = tuple(samples)
    complexes = tuple(complexes)
    maps: list[dict[int, int]] = []
    for k in range(1, len(samples)):
        earlier, later = samples[k - 1], samples[k]
        angles = cross_angle_matrix(later.vectors(), earlier.vectors())
        mapping: dict[int, int] = {}
        for row, token in enumerate(later.tokens):
            best_id = 0
            best = angles[row, 0]
            # Earlier tokens are scanned in ascending id order; strict
            # improvement keeps the first (lowest-id) minimiser on ties.
            for col in range(1, angles.shape[1]):
                if angles[row, col] < best:
                    best = angles[row, col]
                    best_id = col
            mapping[token.token_id] = earlier.tokens[best_id].token_id
        maps.append(mapping)
    return EvolvingText(
        samples=samples,
        complexes=complexes,
        adjacent_restrictions=tuple(maps),
    )


def restrict(
    et: EvolvingText, from_time: int, to_time: int, token_id: int
) -> int:
    """Carry a token id backwards from a later slice to an earlier one.

    Equal times give the identity.  Longer spans compose the stored
    adjacent maps step by step, newest to oldest.
    """
    if to_time > from_time:
        raise TimeOrderViolationError(
            f"cannot restrict forwards from {from_time} to {to_time}"
        )
    j = et.position_of(from_time)
    i = et.position_of(to_time)
    sample = et.samples[j]
    if not 0 <= token_id < len(sample.tokens):
        raise UnknownTokenError(
            f"token {token_id} not in slice at time {from_time}"
        )
    current = token_id
    for k in range(j, i, -1):
        current = et.adjacent_restrictions[k - 1][current]
    return current


def track(et: EvolvingText, surface: str) -> list[TrackedAnchor]:
    """Latest-use anchors for a surface form, one per slice containing it.

    Within a slice the occurrence with the greatest char start wins; a
    slice without the surface contributes nothing.
    """
    anchors: list[TrackedAnchor] = []
    for sample in et.samples:
        occurrences = [t for t in sample.tokens if t.surface == surface]
        if not occurrences:
            continue
        latest = max(occurrences, key=lambda t: t.char_span[0])
        anchors.append(
            TrackedAnchor(
                surface=surface,
                time_index=sample.time_index,
                token_id=latest.token_id,
            )
        )
    return anchors
