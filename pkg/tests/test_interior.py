import numpy as np
import pytest
from scipy import ndimage

from fracberno import exterior, geometry, interior
from fracberno.interior import (InteriorProblem, ball_bracket,
                                bernoulli_constant, inradius_bound_check,
                                is_nontrivial, measure_lower_bound,
                                minimize_interior)

H = 1 / 24
DISK = geometry.Ball((0.0, 0.0), 1.0)


@pytest.fixture(scope="module")
def nontrivial_solution():
    pb = InteriorProblem(D=DISK, lam=3.0, h=H)
    return pb, minimize_interior(pb)


class TestMinimizer:
    def test_trivial_below_threshold(self):
        pb = InteriorProblem(D=DISK, lam=0.05, h=H)
        res = minimize_interior(pb)
        assert not is_nontrivial(pb, res)
        assert not res.plateau.any()
        assert res.exact_energy >= res.trivial_energy - 1e-8

    def test_zero_seed_energy_identity(self):
        pb = InteriorProblem(D=DISK, lam=0.05, h=H, seed="zero")
        res = minimize_interior(pb)
        assert abs(res.exact_energy - res.trivial_energy) <= 1e-10

    def test_nontrivial_above_threshold(self, nontrivial_solution):
        pb, res = nontrivial_solution
        assert is_nontrivial(pb, res)
        assert res.plateau.any()

    def test_plateau_concentric_disk(self, nontrivial_solution):
        _, res = nontrivial_solution
        g = res.u.grid
        pts = g.flat_centers()[res.plateau.ravel()]
        center = pts.mean(axis=0)
        assert np.linalg.norm(center) <= 2 * H
        radii = np.linalg.norm(pts, axis=1)
        # plateau is a disk: its radius spread is one cell diagonal
        assert radii.max() - np.sqrt(radii.max() ** 2 - 2 * H**2) <= 3 * H

    def test_plateau_inside_eroded_domain(self, nontrivial_solution):
        _, res = nontrivial_solution
        eroded = ndimage.binary_erosion(res.dmask)
        assert np.all(~res.plateau | eroded)

    def test_bounds_and_exterior_pinning(self, nontrivial_solution):
        _, res = nontrivial_solution
        assert res.u.values.min() >= 0 and res.u.values.max() <= 1
        assert np.all(res.u.values[~res.dmask] == 0.0)

    def test_interior_rate_at_plateau_boundary(self):
        # the drop 1 - u grows like lambda sqrt(t) along the exterior
        # normal of the plateau; the square-root regime only extends a
        # distance of order 1/lambda^2, so the window is capped there
        h, lam = 1 / 64, 3.0
        pb = InteriorProblem(D=DISK, lam=lam, h=h)
        res = minimize_interior(pb)
        pts = res.u.grid.flat_centers()[res.plateau.ravel()]
        rho = np.linalg.norm(pts, axis=1).max()
        t_hi = max(0.35 / lam**2, 3.2 * h)
        rates = []
        for th in np.linspace(0, 2 * np.pi, 16, endpoint=False):
            nu = np.array([np.cos(th), np.sin(th)])
            lam_hat, _ = exterior.sqrt_rate(
                res.u, rho * nu, nu, (2 * h, t_hi), values="drop")
            rates.append(lam_hat)
        assert abs(np.mean(rates) - lam) / lam <= 0.15


class TestNontriviality:
    def test_zero_function_trivial(self):
        pb = InteriorProblem(D=DISK, lam=1.0, h=H, seed="zero")
        res = minimize_interior(pb)
        assert not is_nontrivial(pb, res)

    def test_empty_plateau_trivial(self, nontrivial_solution):
        pb, res = nontrivial_solution
        import copy

        r2 = copy.copy(res)
        r2.plateau = np.zeros_like(res.plateau)
        assert not is_nontrivial(pb, r2)


class TestBracketFormulas:
    def test_ball_bracket_d2(self):
        lo, hi = ball_bracket(2, 1.0)
        # direct arithmetic of the stated bounds
        assert lo == pytest.approx(2 / np.sqrt(np.pi) * 2**0.25 / 9, rel=1e-12)
        assert lo == pytest.approx(0.1491, abs=2e-4)
        assert hi == pytest.approx(2 / np.sqrt(np.pi) * np.sqrt(2) * 2**2.5, rel=1e-12)
        assert hi == pytest.approx(9.027, abs=2e-3)

    def test_bracket_scaling(self):
        lo1, hi1 = ball_bracket(2, 1.0)
        lo4, hi4 = ball_bracket(2, 4.0)
        assert lo4 == pytest.approx(lo1 / 2) and hi4 == pytest.approx(hi1 / 2)

    def test_measure_lower_bound_matches_ball(self):
        # for the unit disk the volume-based bound reduces to the ball bound
        assert measure_lower_bound(2, np.pi) == pytest.approx(
            ball_bracket(2, 1.0)[0], rel=1e-12)


class TestBisection:
    def test_invalid_bracket_rejected(self):
        with pytest.raises(ValueError, match="bracket invalid"):
            bernoulli_constant(DISK, h=H, bracket=(5.0, 9.0))  # both nontrivial

    def test_ball_estimate_within_bounds(self):
        est = bernoulli_constant(DISK, h=H, tol=0.05)
        lo, hi = ball_bracket(2, 1.0)
        assert lo < est.lambda_hat < hi
        assert est.lambda_lo < est.lambda_hat < est.lambda_hi
        flags = [p["nontrivial"] for p in sorted(est.probes, key=lambda p: p["lam"])]
        assert flags == sorted(flags)  # monotone classification

    def test_homogeneity_proportional_grids(self):
        est1 = bernoulli_constant(DISK, h=H, tol=0.05)
        est2 = bernoulli_constant(geometry.Ball((0.0, 0.0), 2.0), h=2 * H, tol=0.05)
        assert est2.lambda_hat * np.sqrt(2) == pytest.approx(
            est1.lambda_hat, rel=1e-10)

    def test_probe_records(self):
        est = bernoulli_constant(DISK, h=H, tol=0.1)
        for p in est.probes:
            assert p["trivial_energy"] > 0
            if p["nontrivial"]:
                assert p["energy"] < p["trivial_energy"]


class TestInequalityChecks:
    def test_inradius_bounds_hold_for_disk(self):
        out = inradius_bound_check(DISK, h=H, tol=0.05)
        assert out["ok"]
        assert out["lower"] <= out["lambda_hat"] <= out["upper"]

    def test_bound_scaling_consistency(self):
        # both closed-form bounds scale like s^{-1/2}
        up1 = 2 / np.sqrt(np.pi) * np.sqrt(2) * 2**2.5 / np.sqrt(1.0)
        up4 = 2 / np.sqrt(np.pi) * np.sqrt(2) * 2**2.5 / np.sqrt(4.0)
        assert up4 == pytest.approx(up1 / 2)
        lo1 = measure_lower_bound(2, np.pi)
        lo4 = measure_lower_bound(2, np.pi * 16)
        assert lo4 == pytest.approx(lo1 / 2)
