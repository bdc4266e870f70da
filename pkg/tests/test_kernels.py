import numpy as np
import pytest
from scipy.integrate import quad

from fracberno import kernels
from fracberno.grids import Grid, GridFunction


class TestConstants:
    def test_normalization_small_d(self):
        assert kernels.normalization_constant(1) == pytest.approx(1 / (2 * np.pi), abs=1e-12)
        assert kernels.normalization_constant(2) == pytest.approx(1 / (4 * np.pi), abs=1e-12)

    def test_rate_constant_closed_forms(self):
        assert kernels.rate_constant(2) == pytest.approx(2 * np.sqrt(2) / np.pi, abs=1e-12)
        assert kernels.rate_constant(3) == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_ball_constant_d2(self):
        assert kernels.ball_constant(2) == pytest.approx(6 / np.pi, rel=1e-8)

    def test_ball_constant_d3(self):
        assert kernels.ball_constant(3) == pytest.approx(2.31, abs=0.01)

    def test_kernel_constants_bundle(self):
        c = kernels.KernelConstants.for_dimension(2)
        assert c.I_e1 == pytest.approx(np.pi / 2, abs=1e-12)


class TestPoissonKernel:
    def test_point_value_d1(self):
        assert kernels.poisson_kernel([0.0], 1.0) == pytest.approx(1 / np.pi, abs=1e-14)

    def test_scaling_homogeneity(self, rng):
        for _ in range(5):
            x = rng.normal(size=2)
            y = abs(rng.normal()) + 0.1
            s = 2.0
            lhs = kernels.poisson_kernel(s * x, s * y)
            rhs = s ** (-2) * kernels.poisson_kernel(x, y)
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_unit_mass_d2_polar(self):
        mass, _ = quad(lambda r: 2 * np.pi * r * kernels.poisson_kernel([r, 0.0], 1.0),
                       0, np.inf, limit=400)
        assert mass == pytest.approx(1.0, abs=1e-6)

    def test_semigroup_d1(self):
        for y1, y2 in ((0.5, 0.5), (1.0, 0.25), (2.0, 1.5)):
            for x in (0.0, 0.7):
                conv, _ = quad(
                    lambda z: kernels.poisson_kernel([x - z], y1)
                    * kernels.poisson_kernel([z], y2),
                    -np.inf, np.inf, limit=400)
                assert conv == pytest.approx(
                    kernels.poisson_kernel([x], y1 + y2), abs=1e-4)

    def test_nonpositive_height_rejected(self):
        with pytest.raises(ValueError):
            kernels.poisson_kernel([0.0], 0.0)


class TestHarmonicExtension:
    def test_wide_plateau_tends_to_one(self):
        # the kernel has Cauchy tails: the plateau value is 1 minus a
        # tail of order (2/pi) y/L, shrinking as the box grows
        vals = []
        for half in (20.0, 40.0, 80.0):
            g = Grid.from_box([-half], [half], 0.5)
            u = GridFunction(g, np.ones(g.shape))
            vals.append(kernels.harmonic_extension(u, [0.0], 1.0))
        assert vals[0] < vals[1] < vals[2]
        assert vals[2] == pytest.approx(1.0, abs=1e-2)

    def test_indicator_arctan_oracle(self):
        # trace = indicator of (-1, 1) in d=1: extension is
        # (1/pi) * (arctan((1-x)/y) + arctan((1+x)/y)); at x=0 this is
        # (2/pi) arctan(1/y)
        g = Grid.from_box([-8.0], [8.0], 1 / 256)
        x = g.axis_centers(0)
        u = GridFunction(g, (np.abs(x) < 1).astype(float))
        for y in (0.25, 1.0, 3.0):
            val = kernels.harmonic_extension(u, [0.0], y)
            assert val == pytest.approx((2 / np.pi) * np.arctan(1 / y), abs=2e-3)

    def test_zero_function(self):
        g = Grid.from_box([-1.0], [1.0], 0.25)
        u = GridFunction(g, np.zeros(g.shape))
        assert kernels.harmonic_extension(u, [0.3], 0.7) == 0.0

    def test_trace_height_rejected(self):
        g = Grid.from_box([-1.0], [1.0], 0.25)
        u = GridFunction(g, np.zeros(g.shape))
        with pytest.raises(ValueError):
            kernels.harmonic_extension(u, [0.0], 0.0)


class TestRadialProfile:
    def test_arctan_closed_form_d2(self):
        for R in (1.2, 2.0, 5.0):
            assert kernels.profile_I(R, 2) == pytest.approx(
                np.arctan(1 / np.sqrt(R * R - 1)), rel=1e-9)

    def test_j_at_unit_distance_e1(self):
        # |e1 + e1| = 2 and I(2)/I(e1) = 1/3 in the plane
        e1 = np.array([1.0, 0.0])
        assert kernels.profile_j(e1, 2) == pytest.approx(1 / 3, rel=1e-9)

    def test_j_continuous_at_origin(self):
        # the origin sits on the sphere |y + e1| = 1: inside value is 1
        assert kernels.profile_j([0.0, 0.0], 2) == 1.0
        assert kernels.profile_j([1e-9, 0.0], 2) == pytest.approx(1.0, abs=1e-4)

    def test_j_decays(self):
        assert kernels.profile_j([100.0, 0.0], 2) < 0.02

    def test_j_radial_about_minus_e1(self, rng):
        e1 = np.array([1.0, 0.0])
        rho = 1.7
        vals = []
        for th in rng.uniform(0, 2 * np.pi, size=6):
            y = -e1 + rho * np.array([np.cos(th), np.sin(th)])
            vals.append(kernels.profile_j(y, 2))
        assert np.max(vals) - np.min(vals) <= 1e-8

    def test_inside_ball_rejected(self):
        with pytest.raises(ValueError):
            kernels.profile_I(0.9, 2)


class TestSqrtRate:
    def test_rate_d2(self):
        c = kernels.q1_sqrt_rate(2, np.geomspace(1e-4, 0.1, 12))
        assert c == pytest.approx(2 * np.sqrt(2) / np.pi, rel=0.02)

    def test_rate_d3(self):
        c = kernels.q1_sqrt_rate(3, np.geomspace(1e-4, 0.1, 12))
        assert c == pytest.approx(np.sqrt(2), rel=0.02)

    def test_refinement_invariance(self):
        a = kernels.q1_sqrt_rate(2, np.geomspace(1e-4, 0.1, 8))
        b = kernels.q1_sqrt_rate(2, np.geomspace(1e-5, 0.05, 16))
        c0 = kernels.rate_constant(2)
        assert abs(a - c0) / c0 <= 0.02
        assert abs(b - c0) / c0 <= 0.02

    def test_degenerate_grid_rejected(self):
        with pytest.raises(ValueError):
            kernels.q1_sqrt_rate(2, [0.01] * 6)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            kernels.q1_sqrt_rate(2, np.geomspace(1e-3, 0.5, 8))


class TestBoundaryDomination:
    def test_ray_ratios(self):
        ts = np.geomspace(0.01, 5.0, 25)
        pts = np.stack([ts, np.zeros_like(ts)], axis=1)
        ok, max_ratio = kernels.q1_boundary_domination_check(2, pts)
        assert ok
        assert max_ratio <= 1.0 + 1e-4
        # the bound is saturated at the boundary
        e1 = np.array([1.0, 0.0])
        t = 1e-4
        near = kernels.q1(t * e1, 2) / (kernels.rate_constant(2) * np.sqrt(t))
        assert near > 0.97

    def test_random_exterior_samples_d3(self, rng):
        e1 = np.zeros(3)
        e1[0] = 1.0
        pts = []
        while len(pts) < 200:
            p = rng.uniform(-10, 10, size=3)
            if np.linalg.norm(p + e1) > 1.01:
                pts.append(p)
        ok, max_ratio = kernels.q1_boundary_domination_check(3, np.array(pts))
        assert ok and max_ratio <= 1.0 + 1e-4

    def test_inside_sample_rejected(self):
        with pytest.raises(ValueError):
            kernels.q1_boundary_domination_check(2, [[-1.0, 0.0]])


class TestSpectralBallBound:
    def test_d2_unit(self):
        assert kernels.spectral_ball_upper_bound(2, 1.0) == pytest.approx(
            6 / np.pi, rel=1e-4)

    def test_radius_scaling(self):
        assert kernels.spectral_ball_upper_bound(2, 4.0) == pytest.approx(
            (6 / np.pi) / 2.0, rel=1e-12)

    def test_d1_rejected(self):
        with pytest.raises(ValueError):
            kernels.spectral_ball_upper_bound(1, 1.0)


class TestHalfSpaceProfile:
    def test_psi_values(self):
        assert kernels.half_space_profile(np.array([[4.0, 1.0], [-1.0, 5.0]])).tolist() == [2.0, 0.0]

    def test_extension_approaches_trace_d1(self):
        val, tail = kernels.half_space_extension([1.0], 0.01, d=1)
        assert val == pytest.approx(1.0, abs=0.05)
        assert tail < 0.1

    def test_extension_homogeneity_d1(self):
        v1, _ = kernels.half_space_extension([0.5], 0.2, d=1)
        v2, _ = kernels.half_space_extension([1.0], 0.4, d=1)
        assert v2 == pytest.approx(np.sqrt(2) * v1, rel=5e-2)
