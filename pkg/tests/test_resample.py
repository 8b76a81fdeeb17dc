import math

import numpy as np
import pytest
from conftest import L_HEXAGON, UNIT_SQUARE, random_star, star_polygons
from hypothesis import given, settings
from hypothesis import strategies as st

from polarpoly.geometry import TWO_PI, CartesianPolygon, GeometryError, PolarPolygon, Point, geometric_centroid, signed_area, to_cartesian, to_polar
from polarpoly.resample import (
    DenseRadialProfile,
    bracket_rays,
    min_ray_vertex_gap,
    ray_angles,
    ray_segment_intersect,
    resample_batch,
    resample_oracle,
    resample_triangle,
    resample_vector,
    triangle_radii,
)
from polarpoly.shapes import regular_polygon, star

phases = st.floats(0, TWO_PI, exclude_max=True)
ray_counts = st.integers(8, 400)


def hexagon_polar():
    return PolarPolygon(Point(0, 0), np.arange(6) * np.pi / 3, np.full(6, 2.0))


def solve_oracle(o, theta, a, b):
    """np.linalg.solve on o + t1*d = a + t2*(b - a); None on a miss."""
    d = np.array([math.cos(theta), math.sin(theta)])
    e = np.asarray(b) - np.asarray(a)
    mat = np.column_stack([d, -e])
    if abs(np.linalg.det(mat)) < 1e-9:
        return None
    t1, t2 = np.linalg.solve(mat, np.asarray(a) - np.asarray(o))
    if t1 < 0 or not 0 <= t2 <= 1:
        return None
    return t1, t2, np.asarray(o) + t1 * d


class TestProfile:
    def test_invariants(self):
        with pytest.raises(GeometryError):
            DenseRadialProfile(Point(0, 0), np.ones(7))
        with pytest.raises(GeometryError):
            DenseRadialProfile(Point(0, 0), np.r_[np.ones(7), 0.0])

    def test_angles(self):
        p = DenseRadialProfile(Point(0, 0), np.ones(8), phase=0.1)
        np.testing.assert_allclose(p.angles, 0.1 + np.arange(8) * np.pi / 4)

    def test_ray_angles_default_phase(self):
        assert ray_angles(4)[0] == 0.0


class TestTriangle:
    def test_hexagon_vertex_rays(self):
        p = hexagon_polar()
        # six rays (below the profile minimum, so use the raw radii) and twelve
        np.testing.assert_array_equal(triangle_radii(p.angles, p.radii, 6), 2.0)
        np.testing.assert_array_equal(resample_triangle(p, 12).radii[::2], 2.0)

    def test_square_edge_midpoint(self):
        sq = to_polar(UNIT_SQUARE.translated(-0.5, -0.5), (0, 0))
        prof = resample_triangle(sq, 8)
        assert prof.radii[0] == pytest.approx(0.5, abs=1e-15)
        assert prof.radii[1] == pytest.approx(math.sqrt(2) / 2, abs=1e-15)

    def test_near_vertex_snaps(self):
        p = hexagon_polar()
        np.testing.assert_array_equal(triangle_radii(p.angles, p.radii, 6, phase=1e-13), 2.0)

    def test_wide_gap_rejected(self):
        p = PolarPolygon(Point(0, 0), [0.1, 0.2, 3.5], [1, 1, 1])
        with pytest.raises(GeometryError, match="gap"):
            resample_triangle(p, 16)

    def test_bracketing(self):
        a = np.array([0.5, 2.0, 4.0])
        ia, ib, theta, sa, sb = bracket_rays(a, 4)
        # rays at 0, pi/2, pi, 3pi/2
        np.testing.assert_array_equal(ia, [2, 0, 1, 2])
        np.testing.assert_array_equal(ib, [0, 1, 2, 0])
        np.testing.assert_array_equal(sa, [TWO_PI, 0, 0, 0])
        np.testing.assert_array_equal(sb, [0, 0, 0, TWO_PI])

    @given(star_polygons(), ray_counts, phases)
    def test_brackets_enclose_ray(self, p, m, phase):
        ia, ib, theta, sa, sb = bracket_rays(p.angles, m, phase)
        alpha = theta + sa - p.angles[ia]
        beta = p.angles[ib] + sb - theta
        assert np.all(alpha >= 0) and np.all(beta > 0)
        assert np.all(alpha + beta < math.pi)

    def test_min_gap(self):
        assert min_ray_vertex_gap([0.0, 1.0], 4) == 0.0
        assert min_ray_vertex_gap([np.pi / 4], 4) == pytest.approx(np.pi / 4)


class TestIntersect:
    def test_axis_aligned(self):
        hit = ray_segment_intersect((0, 0), 0.0, (1, -1), (1, 1))
        assert hit.point == pytest.approx((1, 0), abs=1e-15)
        assert hit.t1 == pytest.approx(1.0, abs=1e-15)
        assert hit.t2 == pytest.approx(0.5, abs=1e-15)

    def test_miss(self):
        assert ray_segment_intersect((0, 0), np.pi / 2, (1, 2), (3, 2)) is None

    def test_behind_origin(self):
        assert ray_segment_intersect((0, 0), np.pi, (1, -1), (1, 1)) is None

    def test_parallel(self):
        assert ray_segment_intersect((0, 0), 0.0, (0, 1), (2, 1)) is None

    def test_against_linear_solver(self):
        rng = np.random.default_rng(99)
        mismatches = 0
        for _ in range(100_000):
            o, a, b = rng.uniform(-5, 5, (3, 2))
            theta = rng.uniform(0, TWO_PI)
            got = ray_segment_intersect(o, theta, a, b)
            want = solve_oracle(o, theta, a, b)
            if (got is None) != (want is None):
                mismatches += 1
                continue
            if got is not None:
                assert got.t1 == pytest.approx(want[0], abs=1e-10)
                assert got.t2 == pytest.approx(want[1], abs=1e-10)
                assert got.point == pytest.approx(tuple(want[2]), abs=1e-10)
                assert got.t1 >= 0 and 0 <= got.t2 <= 1
        assert mismatches == 0


class TestVector:
    def test_square_corners(self):
        prof = resample_vector(UNIT_SQUARE, geometric_centroid(UNIT_SQUARE), 8, np.pi / 4)
        np.testing.assert_allclose(prof.radii[::2], math.sqrt(2) / 2, rtol=1e-14)

    def test_lshape_against_oracle(self):
        c = geometric_centroid(L_HEXAGON)
        v = resample_vector(L_HEXAGON, c, 360)
        o = resample_oracle(L_HEXAGON, c, 360)
        np.testing.assert_allclose(v.radii, o.radii, atol=1e-9, rtol=0)

    def test_vertex_order_free(self):
        c = geometric_centroid(L_HEXAGON)
        a = resample_vector(L_HEXAGON, c, 90)
        b = resample_vector(L_HEXAGON.reversed(), c, 90)
        np.testing.assert_allclose(a.radii, b.radii, atol=1e-12)

    def test_outermost_hit(self):
        # U-shape; the 30 degree ray from the lower-left corner leaves through
        # the notch floor, re-enters the right arm and exits at x = 3
        u = CartesianPolygon(np.array([(0, 0), (3, 0), (3, 3), (2, 3), (2, 1), (1, 1), (1, 3), (0, 3)], float))
        far = 2.5 / math.cos(math.pi / 6)
        assert resample_vector(u, (0.5, 0.5), 12).radii[1] == pytest.approx(far, rel=1e-12)
        assert resample_oracle(u, (0.5, 0.5), 12).radii[1] == pytest.approx(far, rel=1e-12)

    def test_star_tips(self):
        prof = resample_vector(star(points=3, outer=2.0, inner=0.3), (0.0, 0.0), 12)
        assert prof.radii.max() == pytest.approx(2.0, rel=1e-12)

    def test_outside_origin(self):
        with pytest.raises(GeometryError, match="no boundary crossing"):
            resample_vector(UNIT_SQUARE, (2, 2), 16)

    def test_boundary_origin(self):
        with pytest.raises(GeometryError, match="boundary"):
            resample_vector(UNIT_SQUARE, (0.5, 0.0), 16)

    @settings(max_examples=200)
    @given(star_polygons(), ray_counts, phases)
    def test_concave_against_oracle(self, p, m, phase):
        c = to_cartesian(p)
        v = resample_vector(c, p.origin, m, phase)
        o = resample_oracle(c, p.origin, m, phase)
        np.testing.assert_allclose(v.radii, o.radii, atol=1e-9, rtol=0)

    @settings(max_examples=200)
    @given(star_polygons(convex=True), ray_counts, phases)
    def test_three_way_convex(self, p, m, phase):
        t = resample_triangle(p, m, phase)
        v = resample_vector(to_cartesian(p), p.origin, m, phase)
        o = resample_oracle(to_cartesian(p), p.origin, m, phase)
        np.testing.assert_allclose(t.radii, v.radii, atol=1e-9, rtol=0)
        np.testing.assert_allclose(t.radii, o.radii, atol=1e-9, rtol=0)

    @given(star_polygons(), st.integers(8, 200), phases)
    def test_idempotent(self, p, m, phase):
        prof = resample_vector(to_cartesian(p), p.origin, m, phase)
        again = resample_vector(prof.to_polygon(), p.origin, m, phase)
        np.testing.assert_allclose(again.radii, prof.radii, atol=1e-12, rtol=1e-12)

    @given(star_polygons(convex=True, k_min=5))
    def test_monotone_refinement(self, p):
        c = to_cartesian(p)
        area = signed_area(c)
        gaps = []
        for m in (16, 32, 64, 128):
            induced = resample_vector(c, p.origin, m).to_polygon()
            gaps.append(area - signed_area(induced))
        assert gaps[0] >= -1e-12
        assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < gaps[0]


class TestBatch:
    def test_single(self):
        p = to_polar(regular_polygon(7), (0, 0))
        (got,) = resample_batch([p], 32)
        np.testing.assert_array_equal(got.radii, resample_triangle(p, 32).radii)

    def test_empty(self):
        assert resample_batch([], 32) == []

    @pytest.mark.parametrize("workers", [None, 1, 4])
    def test_bit_identical(self, workers):
        rng = np.random.default_rng(3)
        polys = [random_star(rng, int(rng.integers(3, 30)), convex=True) for _ in range(64)]
        seq = [resample_triangle(p, 90, 0.3) for p in polys]
        got = resample_batch(polys, 90, 0.3, workers=workers)
        for a, b in zip(seq, got):
            np.testing.assert_array_equal(a.radii, b.radii)
            assert a.origin == b.origin

    def test_error_names_index(self):
        good = hexagon_polar()
        bad = PolarPolygon(Point(0, 0), [0.1, 0.2, 3.5], [1, 1, 1])
        with pytest.raises(GeometryError, match="polygon 1"):
            resample_batch([good, bad], 16, workers=2)
