"""Tests for nerve construction, closure, and horn tagging."""

import math
from itertools import combinations

import numpy as np
import pytest

from semdrift.errors import CoverMismatchError, FaceActuallyPresentError
from semdrift.geometry import SphericalCap, angular_distance, normalize
from semdrift.nerve import (
    DASHED,
    MISSING_EDGE,
    MISSING_TRIANGLE,
    SOLID,
    OpenHornTag,
    build_nerve,
    ex_infty_close,
    open_horn_for,
    unwitnessed_detour_apex,
)
from semdrift.slices import (
    CapCover,
    IncidenceRelation,
    SliceSample,
    TokenOccurrence,
    build_cover,
    incidence,
)


def circle_slice(phis, time_index=0):
    tokens = tuple(
        TokenOccurrence(
            token_id=i,
            surface=f"w{i}",
            char_span=(i * 8, i * 8 + 2),
            vector=normalize([math.cos(p), math.sin(p), 0.0]),
        )
        for i, p in enumerate(phis)
    )
    return SliceSample(time_index=time_index, tokens=tokens)


def fixed_radius_setup(phis, radius, time_index=0):
    """Slice + cover with a hand-picked shared radius (bypasses the quantile)."""
    s = circle_slice(phis, time_index)
    cover = CapCover(
        caps=tuple(SphericalCap(t.vector, radius) for t in s.tokens),
        radius_quantile=0.5,
        radius=radius,
    )
    return s, cover, incidence(s, cover)


class TestOpenHornTag:
    def test_kinds_validated(self):
        with pytest.raises(ValueError):
            OpenHornTag("missing_square", (0, 1), 0)

    def test_edge_boundary_must_be_pair(self):
        with pytest.raises(ValueError):
            OpenHornTag(MISSING_EDGE, (0, 1, 2), 0)

    def test_triangle_boundary_two_or_three(self):
        OpenHornTag(MISSING_TRIANGLE, (0, 1, 2), 0)
        OpenHornTag(MISSING_TRIANGLE, (0, 1), 0)
        with pytest.raises(ValueError):
            OpenHornTag(MISSING_TRIANGLE, (0,), 0)


class TestBuildNerve:
    def test_single_intersecting_pair(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.3], 0.2)
        c = build_nerve(cover, inc)
        assert c.solid_edges == frozenset({(0, 1)})
        assert c.dashed_edges == frozenset()

    def test_triangle_gap_two_edges_no_triangle(self):
        # A 1-cycle without its 2-face: ends meet the middle, not each other.
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 1.0], 0.3)
        c = build_nerve(cover, inc)
        assert c.solid_edges == frozenset({(0, 1), (1, 2)})
        assert c.witnessed_triangles == frozenset()

    def test_witnessed_triangle_near_pole(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.05, 0.1], 0.2)
        c = build_nerve(cover, inc)
        assert c.solid_edges == frozenset({(0, 1), (0, 2), (1, 2)})
        assert (0, 1, 2) in c.witnessed_triangles
        witness = c.triangle_witnesses[(0, 1, 2)]
        # Oracle: direct membership of the witness in all three caps.
        for cap in cover.caps:
            assert cap.contains(s.tokens[witness].vector)
        assert witness == 0

    def test_solid_matches_brute_force(self):
        rng = np.random.default_rng(41)
        phis = sorted(rng.uniform(0.0, 1.4, size=8))
        s = circle_slice(list(phis))
        cover = build_cover(s, 0.3)
        c = build_nerve(cover, incidence(s, cover))
        expected = set()
        for i, j in combinations(range(8), 2):
            d = angular_distance(cover.caps[i].center, cover.caps[j].center)
            if d < cover.caps[i].radius + cover.caps[j].radius:
                expected.add((i, j))
        assert c.solid_edges == frozenset(expected)

    def test_incidence_mismatch_rejected(self):
        s, cover, _ = fixed_radius_setup([0.0, 0.3], 0.2)
        missing_reflexive = IncidenceRelation(pairs=frozenset({(0, 0)}))
        with pytest.raises(CoverMismatchError):
            build_nerve(cover, missing_reflexive)

    def test_out_of_range_incidence_rejected(self):
        s, cover, _ = fixed_radius_setup([0.0, 0.3], 0.2)
        stray = IncidenceRelation(
            pairs=frozenset({(0, 0), (1, 1), (5, 0)})
        )
        with pytest.raises(CoverMismatchError):
            build_nerve(cover, stray)


class TestExInftyClose:
    def test_path_gets_dashed_chord(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 1.0], 0.3)
        c = ex_infty_close(build_nerve(cover, inc))
        assert c.dashed_edges == frozenset({(0, 2)})
        assert c.dashed_mediators[(0, 2)] == 1
        assert c.edge_kind(0, 2) == DASHED
        assert c.edge_kind(0, 1) == SOLID

    def test_complete_triangle_adds_nothing(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.05, 0.1], 0.2)
        c = ex_infty_close(build_nerve(cover, inc))
        assert c.dashed_edges == frozenset()

    def test_four_path_one_round_only(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 1.0, 1.5], 0.3)
        c = ex_infty_close(build_nerve(cover, inc))
        # One round: chords over single mediators, no span over two.
        assert c.dashed_edges == frozenset({(0, 2), (1, 3)})

    def test_smallest_mediator_recorded(self):
        # Two candidate mediators at the same spot; the smaller id wins.
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 0.5, 1.0], 0.3)
        c = ex_infty_close(build_nerve(cover, inc))
        assert (0, 3) in c.dashed_edges
        assert c.dashed_mediators[(0, 3)] == 1

    def test_dashed_angle_recorded(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 1.0], 0.3)
        c = ex_infty_close(build_nerve(cover, inc))
        assert c.edge_angle(0, 2) == pytest.approx(1.0, abs=1e-9)

    def test_same_input_closes_identically(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.4, 0.8, 1.3, 1.7], 0.25)
        a = ex_infty_close(build_nerve(cover, inc))
        b = ex_infty_close(build_nerve(cover, inc))
        assert a.solid_edges == b.solid_edges
        assert a.dashed_edges == b.dashed_edges
        assert a.dashed_mediators == b.dashed_mediators

    def test_reclosing_closed_complex_rejected(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 1.0], 0.3)
        c = ex_infty_close(build_nerve(cover, inc))
        with pytest.raises(ValueError):
            ex_infty_close(c)

    def test_mediator_invariants_random(self):
        rng = np.random.default_rng(43)
        for _ in range(30):
            phis = sorted(rng.uniform(0.0, 1.4, size=7))
            s = circle_slice(list(phis))
            try:
                cover = build_cover(s, float(rng.uniform(0.1, 0.5)))
            except Exception:
                continue
            c = ex_infty_close(build_nerve(cover, incidence(s, cover)))
            assert not (c.solid_edges & c.dashed_edges)
            for (x, z), y in c.dashed_mediators.items():
                assert (min(x, y), max(x, y)) in c.solid_edges
                assert (min(y, z), max(y, z)) in c.solid_edges


class TestOpenHornFor:
    def test_missing_edge(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 1.0, 1.5], 0.3)
        c = ex_infty_close(build_nerve(cover, inc))
        tag = open_horn_for(c, (0, 3), 0)
        assert tag.kind == MISSING_EDGE
        assert tag.boundary == (0, 3)
        assert tag.attempt_step == 0

    def test_missing_triangle_over_gap(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 1.0], 0.3)
        c = ex_infty_close(build_nerve(cover, inc))
        # The dashed chord exists but its 2-face was never witnessed.
        tag = open_horn_for(c, (0, 2), 0)
        assert tag.kind == MISSING_TRIANGLE
        assert tag.boundary == (0, 1, 2)

    def test_present_face_refused(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.05, 0.1], 0.2)
        c = ex_infty_close(build_nerve(cover, inc))
        with pytest.raises(FaceActuallyPresentError):
            open_horn_for(c, (0, 1), 0)

    def test_fail_step_bounds_checked(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 1.0], 0.3)
        c = ex_infty_close(build_nerve(cover, inc))
        with pytest.raises(ValueError):
            open_horn_for(c, (0, 2), 5)

    def test_detour_apex_helper(self):
        s, cover, inc = fixed_radius_setup([0.0, 0.5, 1.0], 0.3)
        c = ex_infty_close(build_nerve(cover, inc))
        assert unwitnessed_detour_apex(c, 0, 2) == 1
        # Witnessed triangles give no apex.
        s2, cover2, inc2 = fixed_radius_setup([0.0, 0.05, 0.1], 0.2)
        c2 = ex_infty_close(build_nerve(cover2, inc2))
        assert unwitnessed_detour_apex(c2, 0, 1) is None
