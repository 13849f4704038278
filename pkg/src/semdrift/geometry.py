"""Angular geometry on the unit sphere.

Points are l2-normalised vectors on S^(d-1); the metric is the geodesic
angle d(u, v) = arccos<u, v> in [0, pi].  Regions are open spherical caps
B(mu, rho) with 0 < rho < pi/2.  The radius bound matters: below pi/2 every
nonempty finite intersection of caps is geodesically convex, hence
contractible, so a family of such caps is a good cover and its nerve
faithfully reflects the union's shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapRadiusTooLargeError,
    DimensionMismatchError,
    EmptyInputError,
    ZeroVectorError,
)

HALF_PI = math.pi / 2.0

# Norms at or below this are treated as zero rather than normalised.
ZERO_NORM_FLOOR = 1e-12

# Tolerance on |norm - 1| when accepting coordinates as already unit.
UNIT_NORM_TOL = 1e-9

# Slack subtracted inside ceil() so float noise in q * n (for example
# 0.15 * 20 == 3.0000000000000004) cannot shift a nearest-rank index.
_RANK_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class UnitVector:
    """An l2-normalised point on S^(d-1), d >= 2.

    Coordinates are stored as a read-only float64 array.  Construction
    rejects vectors whose norm strays from 1 by more than UNIT_NORM_TOL;
    use :func:`normalize` to build one from raw coordinates.
    """

    coords: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.coords, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise ValueError("a unit vector needs at least 2 coordinates")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        if abs(float(np.linalg.norm(arr)) - 1.0) > UNIT_NORM_TOL:
            raise ValueError("coordinates are not unit-norm")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)

    @property
    def dim(self) -> int:
        return int(self.coords.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitVector):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __hash__(self) -> int:
        return hash(self.coords.tobytes())

    def __repr__(self) -> str:
        return f"UnitVector({self.coords.tolist()!r})"


@dataclass(frozen=True)
class SphericalCap:
    """Open cap B(center, radius) = {x : d(center, x) < radius}.

    Radii are confined to (0, pi/2): at 0 the cap is empty, and from pi/2
    upwards intersections of caps can fail to be contractible, which would
    silently break every nerve built on top of them.
    """

    center: UnitVector
    radius: float

    def __post_init__(self) -> None:
        radius = float(self.radius)
        if not math.isfinite(radius) or radius <= 0.0:
            raise ValueError("cap radius must be positive")
        if radius >= HALF_PI:
            raise CapRadiusTooLargeError(
                f"cap radius {radius!r} reaches pi/2; the cover would not be good"
            )
        object.__setattr__(self, "radius", radius)

    def contains(self, point: UnitVector) -> bool:
        """Open membership test: strictly closer to the center than radius."""
        return angular_distance(self.center, point) < self.radius


def normalize(raw: Iterable[float] | np.ndarray) -> UnitVector:
    """Project raw coordinates onto the unit sphere.

    Parameters
    ----------
    raw : array-like
        At least two finite coordinates.

    Returns
    -------
    UnitVector

    Raises
    ------
    ZeroVectorError
        If the norm is at or below ZERO_NORM_FLOOR; direction would be
        meaningless noise.
    """
    arr = np.asarray(raw, dtype=np.float64)
    norm = float(np.linalg.norm(arr))
    if not math.isfinite(norm) or norm <= ZERO_NORM_FLOOR:
        raise ZeroVectorError(f"cannot normalise a vector of norm {norm!r}")
    return UnitVector(arr / norm)


def angular_distance(u: UnitVector, v: UnitVector) -> float:
    """Geodesic angle between two unit vectors, in [0, pi].

    The inner product is clamped to [-1, 1] before arccos so rounding can
    never produce a NaN.  Identical coordinate arrays short-circuit to an
    exact 0.0: after normalisation <u, u> can land just below 1, and the
    square-root behaviour of arccos near 1 would otherwise inflate that
    rounding dust into ~1e-8 of spurious self-distance.
    """
    if u.dim != v.dim:
        raise DimensionMismatchError(f"dim {u.dim} vs {v.dim}")
    if np.array_equal(u.coords, v.coords):
        return 0.0
    dot = float(np.dot(u.coords, v.coords))
    return math.acos(min(1.0, max(-1.0, dot)))


def caps_intersect(a: SphericalCap, b: SphericalCap) -> bool:
    """True iff the two open caps share at least one point.

    For caps this reduces to a strict center test:
    B(mu1, r1) and B(mu2, r2) meet iff d(mu1, mu2) < r1 + r2.
    """
    return angular_distance(a.center, b.center) < a.radius + b.radius


def nearest_rank_quantile(values: Sequence[float], q: float) -> float:
    """Nearest-rank quantile: sort ascending, take the ceil(q*n)-th value.

    q must lie in (0, 1].  The result is always an element of ``values``,
    never an interpolation, so downstream strict comparisons against it
    stay meaningful.
    """
    if not 0.0 < q <= 1.0:
        raise ValueError(f"quantile must be in (0, 1], got {q!r}")
    ordered = sorted(float(v) for v in values)
    if not ordered:
        raise EmptyInputError("quantile of an empty multiset")
    rank = math.ceil(q * len(ordered) - _RANK_EPS)
    rank = min(len(ordered), max(1, rank))
    return ordered[rank - 1]


def quantile_radius(pairwise_angles: Sequence[float], q: float) -> float:
    """Pick a shared cap radius as a nearest-rank quantile of angles.

    Parameters
    ----------
    pairwise_angles : sequence of float
        Nonempty multiset of angles in [0, pi].
    q : float
        Quantile in the open interval (0, 1).

    Returns
    -------
    float
        The selected angle.

    Raises
    ------
    EmptyInputError
        If the multiset is empty.
    CapRadiusTooLargeError
        If the selected value is >= pi/2, i.e. the data is too spread out
        for caps at this quantile to form a good cover.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"radius quantile must be in (0, 1), got {q!r}")
    ordered = sorted(float(a) for a in pairwise_angles)
    if not ordered:
        raise EmptyInputError("no pairwise angles to take a quantile of")
    if ordered[0] < 0.0 or ordered[-1] > math.pi:
        raise ValueError("angles must lie in [0, pi]")
    value = nearest_rank_quantile(ordered, q)
    if value >= HALF_PI:
        raise CapRadiusTooLargeError(
            f"quantile {q} selects radius {value!r} >= pi/2"
        )
    return value


def good_cover_check(caps: Iterable[SphericalCap]) -> bool:
    """True iff every radius lies strictly inside (0, pi/2).

    Caps built through :class:`SphericalCap` satisfy this by construction;
    the check exists for caps of unknown provenance (e.g. deserialised).
    An empty family is vacuously good.
    """
    return all(0.0 < float(cap.radius) < HALF_PI for cap in caps)


def angle_matrix(vectors: Sequence[UnitVector]) -> np.ndarray:
    """Full n x n matrix of angular distances, with exact zeros.

    Entries for positions holding identical coordinate arrays are forced
    to exactly 0.0, matching :func:`angular_distance` on the same pairs.
    """
    mat = np.stack([v.coords for v in vectors])
    gram = np.clip(mat @ mat.T, -1.0, 1.0)
    angles = np.arccos(gram)
    groups: dict[bytes, list[int]] = {}
    for i, v in enumerate(vectors):
        groups.setdefault(v.coords.tobytes(), []).append(i)
    for idxs in groups.values():
        if len(idxs) > 1:
            block = np.array(idxs)
            angles[np.ix_(block, block)] = 0.0
    np.fill_diagonal(angles, 0.0)
    return angles


def cross_angle_matrix(
    rows: Sequence[UnitVector], cols: Sequence[UnitVector]
) -> np.ndarray:
    """len(rows) x len(cols) matrix of angles, exact zeros on equal coords."""
    rmat = np.stack([v.coords for v in rows])
    cmat = np.stack([v.coords for v in cols])
    angles = np.arccos(np.clip(rmat @ cmat.T, -1.0, 1.0))
    col_index: dict[bytes, list[int]] = {}
    for j, v in enumerate(cols):
        col_index.setdefault(v.coords.tobytes(), []).append(j)
    for i, v in enumerate(rows):
        for j in col_index.get(v.coords.tobytes(), ()):
            angles[i, j] = 0.0
    return angles


def pairwise_angles(vectors: Sequence[UnitVector]) -> list[float]:
    """Angles over the n(n-1)/2 unordered distinct pairs, row-major order."""
    n = len(vectors)
    if n < 2:
        return []
    angles = angle_matrix(vectors)
    return [float(angles[i, j]) for i in range(n) for j in range(i + 1, n)]
