"""Verification suite: one function per quantitative claim the package
must reproduce, each returning a pass/fail record with the tolerances
pinned in the function body. The CLI `verify` command and the test
suite both drive these.
"""
from __future__ import annotations

import time
from math import pi, sqrt

import numpy as np

from . import geometry, kernels
from .grids import Grid, GridFunction


class InfrastructureError(RuntimeError):
    pass


def _bump(x):
    v = np.zeros_like(x)
    m = np.abs(x) < 1
    v[m] = np.exp(-1.0 / (1.0 - x[m] ** 2))
    return v


def criterion_constants(fast=False):
    c2 = kernels.ball_constant(2)
    c3 = kernels.ball_constant(3)
    rate = kernels.q1_sqrt_rate(2, np.geomspace(1e-4, 0.1, 12))
    c0 = kernels.rate_constant(2)
    details = {
        "c_tilde_2": c2, "c_tilde_2_target": 6 / pi,
        "c_tilde_2_relerr": abs(c2 - 6 / pi) / (6 / pi),
        "c_tilde_3": c3, "c_tilde_3_err": abs(c3 - 2.31),
        "q1_rate": rate, "C0_2": c0,
        "q1_rate_relerr": abs(rate - c0) / c0,
    }
    passed = (details["c_tilde_2_relerr"] <= 1e-4
              and details["c_tilde_3_err"] <= 0.01
              and details["q1_rate_relerr"] <= 0.02)
    return passed, details


def criterion_energy_identity(fast=False):
    from .gagliardo import energy_identity_check

    h_fine = 1 / 32 if fast else 1 / 64
    h_coarse = 2 * h_fine
    discs = {}
    for h in (h_coarse, h_fine):
        g = Grid.from_box([-2.0], [2.0], h)
        u = GridFunction(g, _bump(g.axis_centers(0)))
        discs[h] = energy_identity_check(u)
    details = {"discrepancy_fine": discs[h_fine],
               "discrepancy_coarse": discs[h_coarse],
               "h_fine": h_fine}
    passed = discs[h_fine] <= 0.05 and discs[h_fine] < discs[h_coarse]
    return passed, details


def criterion_divergence(fast=False):
    from .gagliardo import radial_energy_sequence, radial_jump_divergence

    res = (1 / 16, 1 / 32, 1 / 64) if fast else (1 / 16, 1 / 32, 1 / 64, 1 / 128)

    def jump(r):
        return 1.0 if r < 0.4 else 0.0

    energies, slope, min_inc = radial_jump_divergence(jump, 0.4, res, 0.625)

    def smooth(r):
        return float(np.exp(-8.0 * r * r))

    smooth_e = radial_energy_sequence(smooth, res, 0.625)
    smooth_incs = np.abs(np.diff(smooth_e))
    details = {
        "jump_energies": list(energies), "log_slope": slope,
        "min_increment": min_inc,
        "smooth_energies": list(smooth_e),
        "smooth_last_increment_rel": float(smooth_incs[-1] / smooth_e[-1]),
    }
    passed = (min_inc > 0 and slope > 0
              and all(b > a for a, b in zip(energies, energies[1:]))
              and smooth_incs[-1] <= 0.02 * smooth_e[-1]
              and smooth_incs[-1] < smooth_incs[0])
    return passed, details


def criterion_exterior(fast=False):
    from . import exterior

    h = 1 / 48 if fast else 1 / 96
    lam = 2.0
    K = geometry.Ball((0.0, 0.0), 0.5)
    box = ((-1.25, -1.25), (1.25, 1.25))
    res = exterior.minimize_exterior(
        exterior.ExteriorProblem(K=K, lam=lam, h=h, box=box))
    levels = [0.1, 0.3, 0.5, 0.7, 0.9]
    star = exterior.check_starshaped_levels(
        res, geometry.Ball((0.0, 0.0), 0.25), levels)
    rates = exterior.boundary_rates(res, M=64)
    mean_rate = float(np.nanmean(rates["lam_hat"]))
    asym = float(np.max(np.abs(res.u.values - np.rot90(res.u.values))))

    scaled = exterior.minimize_exterior(exterior.ExteriorProblem(
        K=geometry.Ball((0.0, 0.0), 1.0), lam=lam / sqrt(2.0), h=2 * h,
        box=((-2.5, -2.5), (2.5, 2.5))))
    hdist = geometry.mask_hausdorff(res.omega, res.grid.scaled(2.0),
                                    scaled.omega, scaled.grid)
    details = {
        "h": h, "starshaped_levels": star, "mean_rate": mean_rate,
        "rate_relerr": abs(mean_rate - lam) / lam,
        "rotation_asymmetry": asym,
        "homogeneity_hausdorff": hdist, "hausdorff_bound": 2 * (2 * h),
    }
    passed = (all(star.values())
              and details["rate_relerr"] <= 0.15
              and asym <= 2e-2
              and hdist <= 2 * (2 * h))
    return passed, details


def criterion_exterior_comparison(fast=False):
    from . import exterior
    from .cli import _fmt
    import json

    h = 1 / 32 if fast else 1 / 64
    box = ((-1.25, -1.25), (1.25, 1.25))
    chk = exterior.check_uniqueness_monotonicity(
        geometry.Ball((0.0, 0.0), 0.3), geometry.Ball((0.0, 0.0), 0.5),
        lam=2.0, h=h, box=box)
    r1 = chk["results"][1]
    r2 = exterior.minimize_exterior(exterior.ExteriorProblem(
        K=geometry.Ball((0.0, 0.0), 0.5), lam=2.0, h=h, box=box))
    identical = (np.array_equal(r1.u.values, r2.u.values)
                 and json.dumps(_fmt(r1.energies), sort_keys=True)
                 == json.dumps(_fmt(r2.energies), sort_keys=True))
    details = {"h": h, "pointwise_ok": chk["pointwise_ok"],
               "set_ok": chk["set_ok"], "max_violation": chk["max_violation"],
               "rerun_identical": bool(identical)}
    passed = chk["ok"] and chk["max_violation"] <= 1e-6 and identical
    return passed, details


def criterion_interior(fast=False):
    from . import interior

    h = 1 / 24 if fast else 1 / 32
    B1 = geometry.Ball((0.0, 0.0), 1.0)
    est1 = interior.bernoulli_constant(B1, h=h, tol=0.02)
    blo, bhi = interior.ball_bracket(2, 1.0)

    est2 = interior.bernoulli_constant(
        geometry.Ball((0.0, 0.0), 2.0), h=2 * h, tol=0.02)
    homo_err = abs(est2.lambda_hat * sqrt(2.0) - est1.lambda_hat) / est1.lambda_hat

    square = geometry.BoxDomain((-1.1, -1.1), (1.1, 1.1))
    est_sq = interior.bernoulli_constant(square, h=h, tol=0.02)

    h_iso = 1 / 32 if fast else 1 / 64
    usq = geometry.BoxDomain((-0.5, -0.5), (0.5, 0.5))
    iso = interior.isoperimetric_check(usq, h=h_iso, tol=0.02)

    details = {
        "h": h, "lambda_B1": est1.lambda_hat,
        "bracket": (blo, bhi),
        "in_bracket": bool(blo < est1.lambda_hat < bhi),
        "homogeneity_relerr": homo_err,
        "lambda_square_2.2": est_sq.lambda_hat,
        "monotonicity_ok": bool(
            est1.lambda_hat >= est_sq.lambda_hat * (1 - 0.05)),
        "isoperimetric": {k: iso[k] for k in
                          ("ok", "lambda_D", "lambda_ball")},
    }
    passed = (details["in_bracket"] and homo_err <= 0.10
              and details["monotonicity_ok"] and iso["ok"])
    return passed, details


def criterion_distance_bound(fast=False):
    from . import spectral

    h = 1 / 32
    D = geometry.Ball((0.0, 0.0), 1.0)
    lam = 2.5
    bound = 1.0 / lam**2 - 2 * h
    K_bad = geometry.as_polygon(geometry.Ball((0.0, 0.0), 0.905), 64)
    dist_bad = spectral.dist_to_domain_boundary(K_bad, D)
    _, rep = spectral.solve_and_check(D, K_bad, lam, h=h)

    lam_g = 1.2 * kernels.ball_constant(2)
    run = spectral.beurling_grow(D, lam_g, h=1 / 24, n_dirs=16, max_sweeps=5)
    bound_g = 1.0 / lam_g**2 - 2 * (1 / 24)
    dists = [spectral.dist_to_domain_boundary(
        geometry.Polygon(it["vertices"]), D) for it in run.iterates]
    details = {
        "violating_dist": dist_bad, "violating_bound": bound,
        "violating_rejected": bool(not rep.admissible and not rep.dist_ok),
        "iterate_dists_min": min(dists), "grow_bound": bound_g,
    }
    passed = (dist_bad < bound and details["violating_rejected"]
              and min(dists) >= bound_g)
    return passed, details


def criterion_spectral_ball(fast=False):
    from . import spectral

    h = 1 / 24 if fast else 1 / 48
    B1 = geometry.Ball((0.0, 0.0), 1.0)
    est = spectral.lambda_s(B1, h=h, tol=0.05)
    ceiling = (6 / pi) * 1.05

    lam_seed = 1.1 * 6 / pi
    seed = geometry.as_polygon(geometry.Ball((0.0, 0.0), 0.5), 64)
    _, rep = spectral.solve_and_check(B1, seed, lam_seed, h=h)
    details = {
        "h": h, "lambda_s_hi": est.hi, "ceiling": ceiling,
        "below_ceiling": bool(est.hi <= ceiling + 1e-12),
        "profile_seed_admissible": bool(rep.admissible),
        "profile_seed_sup_ratio": rep.sup_ratio,
    }
    passed = details["below_ceiling"] and rep.admissible
    return passed, details


def criterion_beurling(fast=False):
    from . import spectral

    h = 1 / 24 if fast else 1 / 48
    n_dirs = 24 if fast else 48
    D = geometry.Ball((0.0, 0.0), 1.0)
    lam = 1.2 * kernels.ball_constant(2)
    run = spectral.beurling_grow(D, lam, h=h, n_dirs=n_dirs, max_sweeps=12)

    g = Grid.from_box([-1, -1], [1, 1], h)
    convex = geometry.is_convex_mask(geometry.rasterize(run.K_hat, g), g)
    nested = True
    for a, b in zip(run.iterates, run.iterates[1:]):
        hull = geometry.Polygon(b["vertices"])
        if np.max(geometry.polygon_distance(hull, a["vertices"])) > 1e-10:
            nested = False
    lh = run.rates.lam_hat
    ok = np.isfinite(lh)
    band = (lh[ok] >= 0.85 * lam) & (lh[ok] <= 1.05 * lam)
    frac = float(band.sum() / max(ok.sum(), 1))
    details = {
        "h": h, "lambda": lam, "convex": bool(convex), "nested": nested,
        "band_fraction": frac, "mean_rate": float(np.nanmean(lh)),
        "sup_ratio": run.rates.sup_ratio,
        "solves": run.diagnostics["solves"],
    }
    passed = convex and nested and frac >= 0.9
    return passed, details


def criterion_bm(fast=False):
    from . import spectral

    h = 1 / 24 if fast else 1 / 32
    s_values = [0.5] if fast else [0.25, 0.5, 0.75]
    B1 = geometry.Ball((0.0, 0.0), 1.0)
    usq = geometry.BoxDomain((-0.5, -0.5), (0.5, 0.5))
    report = spectral.bm_verify(B1, usq, s_values, h=h, tol=0.05)

    eq = spectral.lambda_s(geometry.minkowski_combine(B1, B1, 0.5), h=h, tol=0.05)
    base = spectral.lambda_s(B1, h=h, tol=0.05)
    eq_err = abs(eq.estimate - base.estimate) / base.estimate
    details = {
        "h": h, "rows": report["rows"], "equality_relerr": eq_err,
        "lambda_D0": report["lambda_D0"], "lambda_D1": report["lambda_D1"],
    }
    passed = report["ok"] and eq_err <= 2 * 0.05 + 0.02
    return passed, details


def criterion_urysohn(fast=False):
    from . import spectral

    h = 1 / 24 if fast else 1 / 48
    usq = geometry.BoxDomain((-0.5, -0.5), (0.5, 0.5))
    report = spectral.urysohn_verify(usq, h=h, tol=0.05)
    details = {k: report[k] for k in
               ("mean_width", "ball_radius", "lambda_D", "lambda_ball",
                "slack", "ok")}
    return bool(report["ok"]), details


def criterion_numerics(fast=False):
    from .gagliardo import assemble, solve_harmonic
    from . import spectral
    from scipy.integrate import quad

    rng = np.random.default_rng(7)
    fd_ok = True
    worst_fd = 0.0
    for dim, box in ((1, ([-1.0], [1.0])), (2, ([-0.5, -0.5], [0.5, 0.5]))):
        g = Grid.from_box(box[0], box[1], 1 / 16)
        form = assemble(g)
        u = rng.uniform(-1, 1, size=g.shape)
        grad = form.gradient(u)
        eps = 1e-5
        flat = u.ravel()
        for idx in rng.choice(flat.size, size=20, replace=False):
            up = flat.copy(); up[idx] += eps
            dn = flat.copy(); dn[idx] -= eps
            fd = (form.energy(up.reshape(g.shape))
                  - form.energy(dn.reshape(g.shape))) / (2 * eps)
            err = abs(grad.ravel()[idx] - fd) / (1.0 + abs(grad.ravel()[idx]))
            worst_fd = max(worst_fd, err)
            fd_ok = fd_ok and err <= 1e-6

    mass1 = quad(lambda x: kernels.poisson_kernel([x], 1.0), -np.inf, np.inf,
                 limit=400)[0]
    mass2 = quad(lambda r: 2 * pi * r * kernels.poisson_kernel([r, 0.0], 1.0),
                 0.0, np.inf, limit=400)[0]

    g = Grid.from_box([-2.0, -2.0], [2.0, 2.0], 1 / 16)
    form = assemble(g)
    pin = geometry.rasterize(geometry.Ball((0.0, 0.0), 0.5), g)
    sol = solve_harmonic(form, GridFunction(g, pin.astype(float), pin))
    res_grad = float(np.max(np.abs(form.gradient(sol.values)[~pin])))

    D = geometry.Ball((0.0, 0.0), 1.0)
    K = spectral.default_seed(D, 1 / 24)
    st = spectral.solve_cylinder(D, K, 1 / 24)

    from . import exterior
    pb = lambda: exterior.minimize_exterior(exterior.ExteriorProblem(
        K=geometry.Ball((0.0, 0.0), 0.4), lam=2.0, h=1 / 24,
        box=((-1.0, -1.0), (1.0, 1.0))))
    ra, rb = pb(), pb()
    deterministic = np.array_equal(ra.u.values, rb.u.values)

    details = {
        "fd_worst": worst_fd, "fd_ok": fd_ok,
        "poisson_mass_d1_err": abs(mass1 - 1.0),
        "poisson_mass_d2_err": abs(mass2 - 1.0),
        "harmonic_reduced_gradient": res_grad,
        "cylinder_residual": st.residual,
        "deterministic": bool(deterministic),
    }
    passed = (fd_ok and abs(mass1 - 1.0) <= 1e-6 and abs(mass2 - 1.0) <= 1e-6
              and res_grad <= 1e-8 and st.residual <= 1e-9 and deterministic)
    return passed, details


CRITERIA = {
    "constants": criterion_constants,
    "energy-identity": criterion_energy_identity,
    "divergence": criterion_divergence,
    "exterior": criterion_exterior,
    "exterior-comparison": criterion_exterior_comparison,
    "interior": criterion_interior,
    "distance-bound": criterion_distance_bound,
    "spectral-ball": criterion_spectral_ball,
    "beurling": criterion_beurling,
    "bm": criterion_bm,
    "urysohn": criterion_urysohn,
    "numerics": criterion_numerics,
}


def run_criterion(name: str, fast=False) -> dict:
    fn = CRITERIA[name]
    t0 = time.time()
    try:
        passed, details = fn(fast=fast)
    except Exception as exc:  # crash = infrastructure, not a clean fail
        raise InfrastructureError(f"criterion {name!r} crashed: {exc}") from exc
    return {"name": name, "passed": bool(passed), "details": details,
            "seconds": time.time() - t0}


def run_suite(suites, fast=False):
    names = list(CRITERIA) if "all" in suites else list(suites)
    return [run_criterion(n, fast=fast) for n in names]
