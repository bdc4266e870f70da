"""Exterior free-boundary solver: relaxed minimization of

    e(u) = Q(u) + (pi/4) lambda^2 * |{u > 0}|

subject to u = 1 on K, with the indicator relaxed by
H_eps(s) = clamp(s/eps, 0, 1) and continuation over shrinking eps,
followed by one exact set step. Positivity-set extraction, boundary
polylines, square-root rate fits, and the comparison checks live here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .gagliardo import GagliardoForm, assemble, solve_harmonic
from .grids import Grid, GridFunction
from .optim import projected_descent

EPS_SCHEDULE = (0.2, 0.1, 0.05, 0.02, 0.01)
AUTO_BOX_MAX_CELLS = 256


@dataclass
class ExteriorProblem:
    K: object
    lam: float
    h: float
    box: tuple = None  # (lo, hi) pair of 2-tuples; auto-sized when None
    eps_schedule: tuple = EPS_SCHEDULE
    tau: float = 0.01
    pg_tol: float = 1e-6
    max_iter: int = 4000

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        eps = tuple(self.eps_schedule)
        if any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] < 1e-4:
            raise ValueError("eps schedule must strictly decrease to >= 1e-4")
        self.eps_schedule = eps

    def build_grid(self) -> Grid:
        if self.box is not None:
            return Grid.from_box(self.box[0], self.box[1], self.h)
        center = np.asarray(geometry.incenter(self.K))
        diam = geometry.diameter(self.K)
        # prefer 3x the data diameter, shrink to the cell budget if needed
        half = 1.5 * diam * max(1.0, 1.5 / (self.lam * np.sqrt(diam / 2)))
        n = int(np.ceil(2 * half / self.h / 2)) * 2
        n = min(n, AUTO_BOX_MAX_CELLS)
        lo = center - n * self.h / 2
        return Grid.from_box(lo, lo + n * self.h, self.h)


@dataclass
class FreeBoundaryResult:
    u: GridFunction
    omega: np.ndarray
    pinned: np.ndarray
    energies: dict
    diagnostics: dict
    stage_trace: list = field(default_factory=list)

    @property
    def grid(self) -> Grid:
        return self.u.grid


def _measure_coeff(lam: float, grid: Grid) -> float:
    return (np.pi / 4.0) * lam * lam * grid.cell_volume


def minimize_exterior(problem: ExteriorProblem) -> FreeBoundaryResult:
    grid = problem.build_grid()
    form = assemble(grid)
    kmask = geometry.rasterize(problem.K, grid)
    if not kmask.any():
        raise ValueError("K rasterizes to an empty mask")
    if _touches_box(kmask, margin=1):
        raise ValueError("K must lie strictly inside the box")

    c_meas = _measure_coeff(problem.lam, grid)
    u0 = solve_harmonic(form, GridFunction(grid, kmask.astype(float), kmask))
    u, stage_trace, diag = _continuation(
        form, kmask, 1.0, c_meas, problem.eps_schedule, u0.values,
        problem.pg_tol, problem.max_iter, interior_domain=None,
    )

    # exact set step: freeze Omega = {u > tau}, re-solve harmonically,
    # accept only if the sharp-interface energy does not increase
    omega = (u > problem.tau) | kmask
    e_before = form.energy(u) + c_meas * np.count_nonzero((u > problem.tau) | kmask)
    pin = kmask | ~omega
    vals = np.where(kmask, 1.0, 0.0)
    u_sharp = solve_harmonic(form, GridFunction(grid, vals, pin))
    e_after = form.energy(u_sharp.values) + c_meas * np.count_nonzero(omega)
    accepted = e_after <= e_before + 1e-8
    if accepted:
        final = u_sharp.values
    else:
        final = u
        diag["set_step_rejected"] = True
    gag = form.energy(final)
    meas = c_meas * np.count_nonzero(omega)
    diag.update(_truncation_diagnostics(omega, grid))
    diag["set_step"] = {
        "accepted": bool(accepted),
        "energy_relaxed_support": e_before,
        "energy_sharp": e_after,
    }
    return FreeBoundaryResult(
        u=GridFunction(grid, final, kmask),
        omega=omega,
        pinned=kmask,
        energies={"gagliardo": gag, "measure": meas, "total": gag + meas,
                  "measure_coeff": c_meas},
        diagnostics=diag,
        stage_trace=stage_trace,
    )


def _continuation(form: GagliardoForm, pin_mask, pin_value, c_meas,
                  eps_schedule, u_init, pg_tol, max_iter, interior_domain):
    """Shared continuation loop; interior_domain selects the functional.

    Exterior flavor (interior_domain None): measure term sum H_eps(u).
    Interior flavor: measure term sum over the domain of H_eps(1 - u).
    """
    grid = form.grid
    u = u_init.copy()
    u[pin_mask] = pin_value
    stage_trace = []
    diag = {}

    def project(v):
        out = np.clip(v, 0.0, 1.0)
        out[pin_mask] = pin_value
        return out

    for eps in eps_schedule:
        if interior_domain is None:

            def fun(v):
                e, gr = form.energy_and_gradient(v)
                e += c_meas * np.sum(np.clip(v / eps, 0.0, 1.0))
                gr = gr + (c_meas / eps) * (v < eps)
                return e, gr

        else:
            dm = interior_domain

            def fun(v):
                e, gr = form.energy_and_gradient(v)
                w = np.clip((1.0 - v) / eps, 0.0, 1.0)
                e += c_meas * np.sum(w[dm])
                gr = gr - (c_meas / eps) * (dm & (v > 1.0 - eps))
                return e, gr

        L = 2.0 * float(np.max(form.diagonal())) + c_meas / eps
        f_start = fun(project(u))[0]
        u, info = projected_descent(fun, project, u, alpha0=1.0 / L,
                                    pg_tol=pg_tol, max_iter=max_iter)
        f_end = info["energy_trace"][-1]
        if f_end > f_start + 1e-6 * (1.0 + abs(f_start)):
            raise RuntimeError("continuation failed")
        stage_trace.append({
            "eps": eps,
            "energy_start": float(f_start),
            "energy_end": float(f_end),
            "iterations": info["iterations"],
            "status": info["status"],
            "pg_norm": float(info["final_pg"]),
        })
    diag["stages"] = len(stage_trace)
    return u, stage_trace, diag


def _touches_box(mask, margin=1):
    m = np.asarray(mask, dtype=bool)
    edge = np.zeros_like(m)
    for a in range(m.ndim):
        sl = [slice(None)] * m.ndim
        sl[a] = slice(0, margin)
        edge[tuple(sl)] = True
        sl[a] = slice(-margin, None)
        edge[tuple(sl)] = True
    return bool((m & edge).any())


def _truncation_diagnostics(omega, grid: Grid) -> dict:
    fill = np.count_nonzero(omega) / omega.size
    return {
        "omega_touches_box": _touches_box(omega, margin=2),
        "omega_fill_fraction": float(fill),
        "truncation_dominated": bool(fill >= 0.9),
    }


# ---------------------------------------------------------------------------
# boundary extraction and square-root rates
# ---------------------------------------------------------------------------


def extract_boundary(result: FreeBoundaryResult, M: int, center=None,
                     level: float = None):
    """Radial boundary polyline of the positivity set (d = 2).

    For M equispaced directions from the center, the boundary radius is
    the last mask crossing along the ray, refined by linear
    interpolation of u across the crossing; interior normals come from
    central differences of the polyline. Requires a starshaped set; use
    mask_boundary_segments as the unordered fallback otherwise.
    """
    grid = result.grid
    if grid.d != 2:
        raise ValueError("boundary extraction is planar only")
    if center is None:
        center = np.asarray(geometry.incenter_of_mask(result.pinned, grid))
    center = np.asarray(center, dtype=float)
    if not geometry.is_starshaped(result.omega, grid, geometry.Ball(tuple(center), 1.9 * grid.h)):
        raise ValueError("use mask boundary")
    level = result.u.values[result.omega].min() * 0.5 if level is None else level
    thetas = 2 * np.pi * np.arange(M) / M
    radii = np.zeros(M)
    h = grid.h
    rmax = 0.5 * min(np.asarray(grid.hi) - np.asarray(grid.lo))
    ts = np.arange(h / 2, rmax, h / 2)
    for k, th in enumerate(thetas):
        dvec = np.array([np.cos(th), np.sin(th)])
        pts = center[None, :] + ts[:, None] * dvec[None, :]
        ok = grid.contains_points(pts)
        idx = grid.cell_index(pts[ok])
        inside = result.omega[idx[:, 0], idx[:, 1]]
        if not inside.any():
            radii[k] = 0.0
            continue
        last = np.where(inside)[0][-1]
        r_in = ts[ok][last]
        if last + 1 < len(ts[ok]):
            vals = result.u.interp([center + r_in * dvec,
                                    center + (r_in + h / 2) * dvec])
            v_in, v_out = float(vals[0]), float(vals[1])
            if v_in > level >= v_out:
                r_in = r_in + (h / 2) * (v_in - level) / max(v_in - v_out, 1e-30)
        radii[k] = r_in
    pts = center[None, :] + radii[:, None] * np.stack(
        [np.cos(thetas), np.sin(thetas)], axis=1)
    tang = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
    normals = np.stack([tang[:, 1], -tang[:, 0]], axis=1)
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    # orient toward the center: interior normals
    flip = np.sum(normals * (center[None, :] - pts), axis=1) < 0
    normals[flip] *= -1.0
    return {"theta": thetas, "radius": radii, "points": pts, "normals": normals,
            "center": center}


def fit_sqrt_rate(t: np.ndarray, w: np.ndarray):
    """Least-squares fit w ~ c sqrt(t); returns (c, relative residual)."""
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    if len(np.unique(t)) < 2:
        raise ValueError("degenerate fit window")
    c = float(np.sum(w * np.sqrt(t)) / np.sum(t))
    denom = float(np.sqrt(np.sum(w * w))) or 1e-30
    res = float(np.sqrt(np.sum((w - c * np.sqrt(t)) ** 2)) / denom)
    return c, res


def sqrt_rate(u: GridFunction, point, normal, t_window, n_samples: int = 12,
              values="direct"):
    """Rate of u along point + t * normal fitted against sqrt(t).

    values="direct" fits u itself (exterior convention); values="drop"
    fits u(point) - u(point + t nu) with u(point) = 1 (interior and
    subsolution convention). The residual is reported, never hidden.
    """
    t_min, t_max = t_window
    if t_min < 2 * u.grid.h - 1e-12:
        raise ValueError("fit window must start at t >= 2h")
    if t_max <= t_min:
        raise ValueError("empty fit window")
    point = np.asarray(point, dtype=float)
    normal = np.asarray(normal, dtype=float)
    normal = normal / np.linalg.norm(normal)
    ts = np.linspace(t_min, t_max, max(int(n_samples), 8))
    pts = point[None, :] + ts[:, None] * normal[None, :]
    if not np.all(u.grid.contains_points(pts)):
        raise ValueError("fit window leaves the grid box")
    vals = u.interp(pts)
    if values == "drop":
        vals = 1.0 - vals
    lam_hat, res = fit_sqrt_rate(ts, vals)
    return lam_hat, res


def boundary_rates(result: FreeBoundaryResult, M: int = 64, center=None,
                   t_max_cells: int = 12):
    """Per-direction rate estimates along interior normals of the free
    boundary; the fit window is [2h, min(t_max_cells*h, half the gap to
    the pinned set)]."""
    grid = result.grid
    h = grid.h
    bnd = extract_boundary(result, M, center=center)
    kpts = grid.flat_centers()[result.pinned.ravel()]
    lam_hats = np.full(M, np.nan)
    residuals = np.full(M, np.nan)
    for k in range(M):
        p = bnd["points"][k]
        nu = bnd["normals"][k]
        gap = np.min(np.linalg.norm(kpts - p[None, :], axis=1))
        t_hi = min(t_max_cells * h, gap / 2)
        if t_hi <= 2 * h:
            continue
        try:
            lam_hats[k], residuals[k] = sqrt_rate(result.u, p, nu, (2 * h, t_hi))
        except ValueError:
            continue
    return {"theta": bnd["theta"], "radius": bnd["radius"], "lam_hat": lam_hats,
            "residual": residuals, "points": bnd["points"],
            "normals": bnd["normals"]}


# ---------------------------------------------------------------------------
# comparison and starshapedness checks
# ---------------------------------------------------------------------------


def check_uniqueness_monotonicity(K_small, K_big, lam: float, h: float,
                                  box=None, slack: float = 1e-6):
    """Solve for nested data sets and compare pointwise on a shared grid."""
    pb = ExteriorProblem(K=K_big, lam=lam, h=h, box=box)
    grid = pb.build_grid()
    box = (grid.lo, grid.hi)
    small_mask = geometry.rasterize(K_small, grid)
    big_mask = geometry.rasterize(K_big, grid)
    if not np.all(~small_mask | big_mask):
        raise ValueError("K_small must rasterize inside K_big")
    r_small = minimize_exterior(ExteriorProblem(K=K_small, lam=lam, h=h, box=box))
    r_big = minimize_exterior(ExteriorProblem(K=K_big, lam=lam, h=h, box=box))
    diff = r_big.u.values - r_small.u.values
    worst = float(diff.min())
    ok_point = worst >= -slack
    from scipy import ndimage

    omega_big_grown = ndimage.binary_dilation(r_big.omega, iterations=1)
    ok_set = bool(np.all(~r_small.omega | omega_big_grown))
    worst_cell = np.unravel_index(np.argmin(diff), diff.shape)
    return {
        "ok": bool(ok_point and ok_set),
        "pointwise_ok": bool(ok_point),
        "set_ok": ok_set,
        "max_violation": max(-worst, 0.0),
        "worst_cell": tuple(int(i) for i in worst_cell),
        "results": (r_small, r_big),
    }


def check_starshaped_levels(result: FreeBoundaryResult, center: geometry.Ball,
                            levels):
    """Starshapedness of every superlevel set {u > eps} with the center
    ball; the pinned data set must itself pass the hypothesis."""
    grid = result.grid
    try:
        data_ok = geometry.is_starshaped(result.pinned, grid, center)
    except geometry.CenterOutsideError:
        data_ok = False
    if not data_ok:
        raise ValueError("hypothesis violated")
    out = {}
    for eps in levels:
        mask = result.u.values > eps
        out[float(eps)] = bool(geometry.is_starshaped(mask, grid, center))
    return out
