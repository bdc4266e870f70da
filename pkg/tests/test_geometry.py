import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracberno import geometry
from fracberno.geometry import (Ball, BoxDomain, CenterOutsideError, Polygon,
                                StarShaped)
from fracberno.grids import Grid
from conftest import random_convex_polygon


def unit_directions(n):
    th = 2 * np.pi * np.arange(n) / n
    return np.stack([np.cos(th), np.sin(th)], axis=1)


class TestDomainValidation:
    def test_ball_radius_positive(self):
        with pytest.raises(ValueError):
            Ball((0, 0), 0.0)

    def test_box_ordering(self):
        with pytest.raises(ValueError):
            BoxDomain((0, 0), (0, 1))

    def test_polygon_ccw_required(self):
        with pytest.raises(ValueError):
            Polygon([(0, 0), (0, 1), (1, 0)])  # clockwise

    def test_polygon_simple_required(self):
        with pytest.raises(ValueError):
            Polygon([(0, 0), (1, 1), (1, 0), (0, 1)])  # bowtie

    def test_star_profile_positive(self):
        with pytest.raises(ValueError):
            StarShaped((0, 0), [1.0, -0.1, 1.0, 1.0])

    def test_json_roundtrip(self):
        doms = [
            Ball((0.5, -1.0), 2.0),
            BoxDomain((0, 0), (1, 2)),
            Polygon([(0, 0), (1, 0), (0, 1)]),
            StarShaped((0, 0), 0.4 + 0.15 * np.cos(4 * np.linspace(0, 2 * np.pi, 64, endpoint=False))),
        ]
        for d in doms:
            back = geometry.domain_from_json(geometry.domain_to_json(d))
            assert type(back) is type(d)


class TestStarshapedMask:
    def test_ball_mask_true(self):
        g = Grid.from_box([-1, -1], [1, 1], 1 / 32)
        mask = geometry.rasterize(Ball((0, 0), 0.8), g)
        assert geometry.is_starshaped(mask, g, Ball((0, 0), 0.2))

    def test_annulus_center_outside(self):
        g = Grid.from_box([-2.5, -2.5], [2.5, 2.5], 1 / 16)
        c = g.centers()
        r = np.linalg.norm(c, axis=-1)
        mask = (r > 1) & (r < 2)
        with pytest.raises(CenterOutsideError):
            geometry.is_starshaped(mask, g, Ball((0, 0), 0.2))

    def test_l_shape_64_grid(self):
        # union of two rectangles sharing the corner square: starshaped
        # with respect to a ball inside the shared square
        g = Grid.from_box([0, 0], [2, 2], 2 / 64)
        c = g.centers()
        arm_a = (c[..., 0] < 2) & (c[..., 1] < 1)
        arm_b = (c[..., 0] < 1) & (c[..., 1] < 2)
        mask = arm_a | arm_b
        assert geometry.is_starshaped(mask, g, Ball((0.5, 0.5), 0.2))
        # removing a bite near the far end of one arm breaks the property
        bite = (np.linalg.norm(c - np.array([1.5, 0.5]), axis=-1) < 0.2)
        assert not geometry.is_starshaped(mask & ~bite, g, Ball((0.5, 0.5), 0.2))

    def test_empty_mask_rejected(self):
        g = Grid.from_box([0, 0], [1, 1], 1 / 8)
        with pytest.raises(ValueError):
            geometry.is_starshaped(np.zeros(g.shape, bool), g, Ball((0.5, 0.5), 0.1))


class TestConvexMask:
    def test_disk_mask_convex(self):
        g = Grid.from_box([-1, -1], [1, 1], 1 / 32)
        assert geometry.is_convex_mask(geometry.rasterize(Ball((0, 0), 0.7), g), g)

    def test_plus_shape_not_convex(self):
        g = Grid.from_box([-1, -1], [1, 1], 1 / 16)
        c = g.centers()
        mask = (np.abs(c[..., 0]) < 0.2) | (np.abs(c[..., 1]) < 0.2)
        assert not geometry.is_convex_mask(mask, g)

    def test_random_hull_roundtrip(self, rng):
        g = Grid.from_box([-3, -3], [3, 3], 1 / 64)
        for _ in range(3):
            poly = random_convex_polygon(rng, n_points=20)
            mask = geometry.rasterize(poly, g)
            assert geometry.is_convex_mask(mask, g)

    def test_empty_mask_error(self):
        g = Grid.from_box([0, 0], [1, 1], 1 / 8)
        with pytest.raises(ValueError):
            geometry.is_convex_mask(np.zeros(g.shape, bool), g)


class TestMinkowski:
    def test_ball_combined_with_itself(self):
        b = Ball((0.0, 0.0), 1.0)
        for s in (0.1, 0.5, 0.9):
            mk = geometry.minkowski_combine(b, b, s, n=256)
            ref = geometry.as_polygon(b, 256)
            dirs = unit_directions(360)
            err = np.max(np.abs(geometry.support(mk, dirs) - geometry.support(ref, dirs)))
            assert err <= 1e-12

    def test_square_with_rotated_square(self):
        sq = geometry.as_polygon(BoxDomain((-0.5, -0.5), (0.5, 0.5)))
        r = np.sqrt(2) / 2
        rot = Polygon([(r, 0), (0, r), (-r, 0), (0, -r)])
        mk = geometry.minkowski_combine(sq, rot, 0.5)
        assert len(mk.vertices) == 8  # regular octagon
        dirs = unit_directions(360)
        target = 0.5 * geometry.support(sq, dirs) + 0.5 * geometry.support(rot, dirs)
        assert np.max(np.abs(geometry.support(mk, dirs) - target)) <= 1e-12

    def test_s_zero_identity(self):
        p = Polygon([(0, 0), (2, 0), (1, 1.5)])
        out = geometry.minkowski_combine(p, Ball((0, 0), 1.0), 0.0)
        assert np.allclose(out.vertices, p.vertices)

    def test_nonconvex_rejected(self):
        notch = Polygon([(0, 0), (2, 0), (2, 2), (1, 0.5), (0, 2)])
        with pytest.raises(ValueError, match="nonconvex"):
            geometry.minkowski_combine(notch, Ball((0, 0), 1.0), 0.5)

    @settings(max_examples=20, deadline=None)
    @given(s=st.floats(0.01, 0.99), seed=st.integers(0, 10**6))
    def test_support_linearity(self, s, seed):
        rng = np.random.default_rng(seed)
        a = random_convex_polygon(rng)
        b = random_convex_polygon(rng)
        mk = geometry.minkowski_combine(a, b, s)
        dirs = unit_directions(90)
        target = (1 - s) * geometry.support(a, dirs) + s * geometry.support(b, dirs)
        assert np.max(np.abs(geometry.support(mk, dirs) - target)) <= 1e-10


class TestMeanWidth:
    def test_ball(self):
        assert geometry.mean_width(Ball((3.0, -1.0), 0.75)) == pytest.approx(1.5)

    def test_unit_square_perimeter_oracle(self):
        sq = geometry.as_polygon(BoxDomain((0, 0), (1, 1)))
        w = geometry.mean_width(sq)
        assert w == pytest.approx(geometry.perimeter(sq) / np.pi, rel=1e-3)
        assert w == pytest.approx(4 / np.pi, rel=1e-3)

    def test_thin_box_limit(self):
        eps = 1e-6
        thin = geometry.as_polygon(BoxDomain((0, 0), (1, eps)))
        w = geometry.mean_width(thin)
        assert w == pytest.approx((2 + 2 * eps) / np.pi, rel=1e-3)

    def test_scaling_exact_for_polygon(self, rng):
        p = random_convex_polygon(rng)
        w = geometry.mean_width(p)
        p2 = Polygon(2.5 * p.vertices)
        assert abs(geometry.mean_width(p2) - 2.5 * w) <= 1e-10 * max(1, w)

    def test_nonconvex_rejected(self):
        notch = Polygon([(0, 0), (2, 0), (2, 2), (1, 0.5), (0, 2)])
        with pytest.raises(ValueError, match="nonconvex"):
            geometry.mean_width(notch)


class TestInradius:
    def test_ball(self):
        assert geometry.inradius(Ball((1, 1), 0.3)) == 0.3

    def test_unit_square(self):
        assert geometry.inradius(BoxDomain((0, 0), (1, 1))) == pytest.approx(0.5)

    def test_right_triangle_area_over_semiperimeter(self):
        tri = Polygon([(0, 0), (1, 0), (0, 1)])
        area = 0.5
        semi = (1 + 1 + np.sqrt(2)) / 2
        assert geometry.inradius(tri) == pytest.approx(area / semi, abs=1e-9)

    def test_monotone_under_inclusion(self, rng):
        for _ in range(5):
            outer = random_convex_polygon(rng, n_points=15)
            c = geometry.centroid(outer)
            inner = Polygon(c + 0.6 * (outer.vertices - c))
            assert geometry.inradius(inner) <= geometry.inradius(outer) + 1e-9

    def test_star_domain(self):
        th = np.linspace(0, 2 * np.pi, 128, endpoint=False)
        star = StarShaped((0, 0), 0.4 + 0.15 * np.cos(4 * th))
        r = geometry.inradius(star)
        assert 0.2 < r <= 0.25 + 0.02  # profile minimum is 0.25


class TestDistancesAndRays:
    def test_polygon_distance_inside_zero(self):
        sq = geometry.as_polygon(BoxDomain((0, 0), (1, 1)))
        d = geometry.polygon_distance(sq, [[0.5, 0.5], [2.0, 0.5]])
        assert d[0] == 0.0
        assert d[1] == pytest.approx(1.0)

    def test_ray_boundary_hits_square(self):
        sq = geometry.as_polygon(BoxDomain((-1, -1), (1, 1)))
        pts, normals = geometry.ray_boundary_hits(sq, (0, 0), [0.0, np.pi / 2])
        assert np.allclose(pts[0], [1, 0])
        assert np.allclose(normals[0], [1, 0])
        assert np.allclose(pts[1], [0, 1])

    def test_hausdorff_identical_masks(self):
        g = Grid.from_box([-1, -1], [1, 1], 1 / 16)
        m = geometry.rasterize(Ball((0, 0), 0.5), g)
        assert geometry.mask_hausdorff(m, g, m, g) == 0.0

    def test_mask_boundary_segments_count(self):
        g = Grid.from_box([0, 0], [1, 1], 1 / 4)
        mask = np.zeros(g.shape, bool)
        mask[1, 1] = True
        segs = geometry.mask_boundary_segments(mask, g)
        assert len(segs) == 4
