"""The 1-skeleton (plus witnessed triangles) of a slice's cap nerve.

Vertices are the slice's tokens.  A solid edge joins two tokens whose caps
intersect; a triangle is recorded only when some token demonstrably lies in
all three caps, and that witness is stored with it.  On top of the solid
graph, one closure round adds a dashed edge wherever two non-adjacent
vertices share a solid neighbour.  Dashed edges mark two-step connections
that behave like edges for walking purposes but have no direct overlap
backing them; they never mediate further dashed edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .errors import CoverMismatchError, FaceActuallyPresentError
from .geometry import UnitVector, angle_matrix, angular_distance
from .slices import CapCover, IncidenceRelation

SOLID = "solid"
DASHED = "dashed"

MISSING_EDGE = "missing_edge"
MISSING_TRIANGLE = "missing_triangle"


@dataclass(frozen=True)
class OpenHornTag:
    """Names the face whose absence blocked a step of a failed walk.

    kind is "missing_edge" with a 2-vertex boundary (the pair is not an
    edge of any kind), or "missing_triangle" with a 3-vertex boundary (a
    two-solid-edge detour exists around the step but no witnessed triangle
    fills it).  A 2-vertex missing_triangle boundary is the degenerate
    form: the step's edge exists, yet no witnessed 2-face sits over it at
    all, so there is no concrete apex to name.
    """

    kind: str
    boundary: tuple[int, ...]
    attempt_step: int

    def __post_init__(self) -> None:
        if self.kind not in (MISSING_EDGE, MISSING_TRIANGLE):
            raise ValueError(f"unknown horn kind {self.kind!r}")
        if self.kind == MISSING_EDGE and len(self.boundary) != 2:
            raise ValueError("missing_edge boundary must have 2 vertices")
        if self.kind == MISSING_TRIANGLE and len(self.boundary) not in (2, 3):
            raise ValueError("missing_triangle boundary must have 2 or 3 vertices")


@dataclass(frozen=True, eq=False)
class SliceComplex:
    """Nerve 1-skeleton of one slice, immutable once closed.

    edge_angles maps each edge (solid and dashed alike) to the angular
    distance between its endpoint embeddings; dashed_mediators maps each
    dashed edge to the smallest vertex whose two solid edges produced it.
    """

    time_index: int
    vertices: tuple[int, ...]
    vectors: tuple[UnitVector, ...]
    solid_edges: frozenset[tuple[int, int]]
    dashed_edges: frozenset[tuple[int, int]]
    dashed_mediators: Mapping[tuple[int, int], int]
    triangle_witnesses: Mapping[tuple[int, int, int], int]
    edge_angles: Mapping[tuple[int, int], float]

    @property
    def witnessed_triangles(self) -> frozenset[tuple[int, int, int]]:
        return frozenset(self.triangle_witnesses)

    def edge_kind(self, a: int, b: int) -> str | None:
        """"solid", "dashed", or None when the pair is not an edge."""
        pair = _ordered(a, b)
        if pair in self.solid_edges:
            return SOLID
        if pair in self.dashed_edges:
            return DASHED
        return None

    def edge_angle(self, a: int, b: int) -> float:
        return self.edge_angles[_ordered(a, b)]

    def solid_neighbors(self, v: int) -> tuple[int, ...]:
        out = [b if a == v else a for (a, b) in self.solid_edges if v in (a, b)]
        return tuple(sorted(out))

    def neighbors(self, v: int, include_dashed: bool) -> tuple[int, ...]:
        edges = self.solid_edges | self.dashed_edges if include_dashed else self.solid_edges
        out = [b if a == v else a for (a, b) in edges if v in (a, b)]
        return tuple(sorted(out))


def _ordered(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


def build_nerve(
    cover: CapCover, inc: IncidenceRelation, time_index: int = 0
) -> SliceComplex:
    """Solid 1-skeleton plus witnessed triangles; no dashed edges yet.

    Solid edges come straight from pairwise cap intersections.  Triangles
    are witness-based: (i, j, k) is recorded iff some token lies in all
    three caps according to the incidence relation, and the smallest such
    token id is stored as the witness.
    """
    n = len(cover.caps)
    for (t, j) in inc.pairs:
        if not (0 <= t < n and 0 <= j < n):
            raise CoverMismatchError(f"incidence pair {(t, j)!r} outside 0..{n - 1}")
    for t in range(n):
        if (t, t) not in inc.pairs:
            raise CoverMismatchError(f"incidence is missing reflexive pair ({t}, {t})")

    centers = [cap.center for cap in cover.caps]
    angles = angle_matrix(centers)
    solid: set[tuple[int, int]] = set()
    edge_angles: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            if angles[i, j] < cover.caps[i].radius + cover.caps[j].radius:
                solid.add((i, j))
                edge_angles[(i, j)] = float(angles[i, j])

    witnesses: dict[tuple[int, int, int], int] = {}
    for t in range(n):
        containing = inc.caps_of(t)
        for triple in combinations(containing, 3):
            witnesses.setdefault(triple, t)

    return SliceComplex(
        time_index=time_index,
        vertices=tuple(range(n)),
        vectors=tuple(centers),
        solid_edges=frozenset(solid),
        dashed_edges=frozenset(),
        dashed_mediators={},
        triangle_witnesses=witnesses,
        edge_angles=edge_angles,
    )


def ex_infty_close(complex_: SliceComplex) -> SliceComplex:
    """One round of shared-neighbour closure over the solid graph.

    For every non-adjacent pair with a common solid neighbour, add a
    dashed edge and record the smallest mediating vertex.  Only solid
    edges mediate; the round is applied once, so dashed edges never beget
    further dashed edges.  The input must not be closed already.
    """
    if complex_.dashed_edges:
        raise ValueError("complex already carries dashed edges")

    adjacency: dict[int, list[int]] = {v: [] for v in complex_.vertices}
    for (a, b) in complex_.solid_edges:
        adjacency[a].append(b)
        adjacency[b].append(a)

    index = {v: i for i, v in enumerate(complex_.vertices)}
    mediators: dict[tuple[int, int], int] = {}
    edge_angles = dict(complex_.edge_angles)
    # Ascending mediator scan: the first vertex to claim a pair is the
    # smallest one that connects it, which keeps the record deterministic.
    for y in sorted(adjacency):
        for x, z in combinations(sorted(adjacency[y]), 2):
            pair = _ordered(x, z)
            if pair in complex_.solid_edges or pair in mediators:
                continue
            mediators[pair] = y
            u = complex_.vectors[index[x]]
            w = complex_.vectors[index[z]]
            edge_angles[pair] = angular_distance(u, w)

    return SliceComplex(
        time_index=complex_.time_index,
        vertices=complex_.vertices,
        vectors=complex_.vectors,
        solid_edges=complex_.solid_edges,
        dashed_edges=frozenset(mediators),
        dashed_mediators=mediators,
        triangle_witnesses=dict(complex_.triangle_witnesses),
        edge_angles=edge_angles,
    )


def unwitnessed_detour_apex(complex_: SliceComplex, x: int, z: int) -> int | None:
    """Smallest vertex y with solid edges to both x and z but no witnessed
    triangle {x, y, z}; None when no such detour exists."""
    pair = _ordered(x, z)
    mediator = complex_.dashed_mediators.get(pair)
    if mediator is not None:
        # A dashed edge's mediator triangle can never be witnessed: a
        # witness in all three caps would have made (x, z) solid.
        return mediator
    xs = set(complex_.solid_neighbors(x))
    for y in complex_.solid_neighbors(z):
        if y in xs and y not in (x, z):
            if tuple(sorted((x, y, z))) not in complex_.triangle_witnesses:
                return y
    return None


def open_horn_for(
    complex_: SliceComplex, attempt_vertices: Sequence[int], fail_step: int
) -> OpenHornTag:
    """Tag the absent face at a failing step of a walk.

    If the step pair is not an edge at all, the edge itself is the missing
    face.  If the pair is an edge but a two-solid-edge detour around it has
    no witnessed triangle, that unfilled triangle is the missing face.
    When neither applies the named face exists, which is an error.
    """
    if not 0 <= fail_step < len(attempt_vertices) - 1:
        raise ValueError(f"fail_step {fail_step} outside the attempt's steps")
    x = attempt_vertices[fail_step]
    z = attempt_vertices[fail_step + 1]
    if complex_.edge_kind(x, z) is None:
        return OpenHornTag(MISSING_EDGE, _ordered(x, z), fail_step)
    apex = unwitnessed_detour_apex(complex_, x, z)
    if apex is not None:
        return OpenHornTag(MISSING_TRIANGLE, tuple(sorted((x, apex, z))), fail_step)
    raise FaceActuallyPresentError(
        f"step ({x}, {z}) is an edge and every detour triangle is filled"
    )
