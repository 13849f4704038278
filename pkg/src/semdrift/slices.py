"""Token slices, cap covers, and the token-in-cap incidence relation.

A slice is one snapshot of a growing text: every token occurrence carries
its surface form, character span, and a unit-vector embedding.  The cover
puts one open cap on each token's vector, all sharing a radius picked as a
quantile of the slice's pairwise angles, and the incidence relation records
which tokens land inside which caps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoverMismatchError
from .geometry import (
    SphericalCap,
    UnitVector,
    angle_matrix,
    cross_angle_matrix,
    good_cover_check,
    quantile_radius,
)

# Radius used when a slice offers no positive pairwise angle to quantile:
# a single token, or a quantile that lands on a duplicate-vector zero.
# Small enough to keep such caps effectively point-like, large enough to
# keep every cap an honest open neighbourhood of its own token.
SINGLETON_RADIUS = 1e-6


@dataclass(frozen=True)
class TokenOccurrence:
    """One token occurrence inside a slice."""

    token_id: int
    surface: str
    char_span: tuple[int, int]
    vector: UnitVector

    def __post_init__(self) -> None:
        if self.token_id < 0:
            raise ValueError("token_id must be >= 0")
        start, end = self.char_span
        if start < 0 or start >= end:
            raise ValueError(f"bad char span {self.char_span!r}")
        object.__setattr__(self, "char_span", (int(start), int(end)))


@dataclass(frozen=True, eq=False)
class SliceSample:
    """A nonempty snapshot of embedded tokens at one time index.

    Token ids must be dense 0..n-1 (tokens are stored in id order) and all
    vectors must share one ambient dimension.
    """

    time_index: int
    tokens: tuple[TokenOccurrence, ...]

    def __post_init__(self) -> None:
        tokens = tuple(sorted(self.tokens, key=lambda t: t.token_id))
        if not tokens:
            raise ValueError("a slice needs at least one token")
        ids = [t.token_id for t in tokens]
        if ids != list(range(len(tokens))):
            raise ValueError(f"token ids must be dense 0..n-1, got {ids!r}")
        dims = {t.vector.dim for t in tokens}
        if len(dims) != 1:
            raise ValueError(f"mixed vector dimensions in slice: {sorted(dims)}")
        object.__setattr__(self, "tokens", tokens)

    @property
    def dim(self) -> int:
        return self.tokens[0].vector.dim

    def vectors(self) -> list[UnitVector]:
        return [t.vector for t in self.tokens]


@dataclass(frozen=True, eq=False)
class CapCover:
    """One cap per token, all sharing a quantile-selected radius."""

    caps: tuple[SphericalCap, ...]
    radius_quantile: float
    radius: float

    def __post_init__(self) -> None:
        if not self.caps:
            raise ValueError("a cover needs at least one cap")
        if not good_cover_check(self.caps):
            raise ValueError("cover contains a cap outside (0, pi/2)")


@dataclass(frozen=True, eq=False)
class IncidenceRelation:
    """Set of (token_id, cap_index) pairs under open membership."""

    pairs: frozenset[tuple[int, int]]

    def caps_of(self, token_id: int) -> tuple[int, ...]:
        """Indices of the caps containing this token, ascending."""
        return tuple(sorted(j for (t, j) in self.pairs if t == token_id))

    def tokens_in(self, cap_index: int) -> tuple[int, ...]:
        """Ids of the tokens inside this cap, ascending."""
        return tuple(sorted(t for (t, j) in self.pairs if j == cap_index))


def build_cover(sample: SliceSample, q: float) -> CapCover:
    """Build the shared-radius cap cover of a slice.

    The radius is the nearest-rank q-quantile of the n(n-1)/2 distinct
    pairwise angles (self-distances excluded).  A singleton slice, or a
    quantile that lands on a duplicate-vector zero, falls back to
    SINGLETON_RADIUS so that every cap stays a nonempty open set.

    Raises CapRadiusTooLargeError when the selected radius reaches pi/2:
    the tokens are too dispersed for a q-quantile cover to be good.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"radius quantile must be in (0, 1), got {q!r}")
    vectors = sample.vectors()
    if len(vectors) == 1:
        radius = SINGLETON_RADIUS
    else:
        angles = _pairwise_from_matrix(angle_matrix(vectors))
        radius = quantile_radius(angles, q)
        if radius <= 0.0:
            radius = SINGLETON_RADIUS
    caps = tuple(SphericalCap(v, radius) for v in vectors)
    return CapCover(caps=caps, radius_quantile=q, radius=radius)


def incidence(sample: SliceSample, cover: CapCover) -> IncidenceRelation:
    """Open-membership incidence between a slice and its cover.

    (t, j) is present iff token t's vector lies strictly inside cap j.
    With the positive shared radius this is always reflexive: each token
    sits in its own cap at distance exactly zero.
    """
    if len(cover.caps) != len(sample.tokens):
        raise CoverMismatchError(
            f"{len(sample.tokens)} tokens vs {len(cover.caps)} caps"
        )
    angles = cross_angle_matrix(
        sample.vectors(), [cap.center for cap in cover.caps]
    )
    radii = np.array([cap.radius for cap in cover.caps])
    inside = angles < radii[np.newaxis, :]
    pairs = frozenset(
        (int(t), int(j)) for t, j in np.argwhere(inside)
    )
    return IncidenceRelation(pairs=pairs)


def _pairwise_from_matrix(angles: np.ndarray) -> list[float]:
    n = angles.shape[0]
    return [float(angles[i, j]) for i in range(n) for j in range(i + 1, n)]
