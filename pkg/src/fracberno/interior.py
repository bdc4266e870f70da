"""Interior free-boundary solver and the Bernoulli constant by bisection.

Minimizes Q(u) + (pi/4) lambda^2 * |{u < 1} intersect D| with u = 0 off
D, by the same relaxed continuation as the exterior problem (applied to
1 - u inside D) from a mandatory nontrivial seed, followed by an exact
plateau step. Nontriviality of the minimizer against the flat state at
energy (pi/4) lambda^2 |D| drives the bisection for the threshold.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np
from scipy import ndimage

from . import geometry
from .exterior import EPS_SCHEDULE, FreeBoundaryResult, _continuation, _measure_coeff
from .gagliardo import assemble, solve_harmonic
from .grids import Grid, GridFunction


@dataclass
class InteriorProblem:
    D: object
    lam: float
    h: float
    box: tuple = None  # auto: bounding box of D padded by 2 cells
    eps_schedule: tuple = EPS_SCHEDULE
    sigma: float = 0.02  # plateau threshold: cells with u >= 1 - sigma
    pg_tol: float = 1e-6
    max_iter: int = 4000
    seed: str = "core"  # or "zero" for the unseeded descent

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        self.eps_schedule = tuple(self.eps_schedule)

    def build_grid(self) -> Grid:
        if self.box is not None:
            return Grid.from_box(self.box[0], self.box[1], self.h)
        dirs = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        hsup = geometry.support(self.D, dirs)
        lo = np.array([-hsup[1], -hsup[3]])
        hi = np.array([hsup[0], hsup[2]])
        lo = np.floor(lo / self.h - 2) * self.h
        hi = np.ceil(hi / self.h + 2) * self.h
        return Grid.from_box(lo, hi, self.h)


@dataclass
class BernoulliEstimate:
    lambda_lo: float
    lambda_hi: float
    lambda_hat: float
    probes: list = field(default_factory=list)
    plateau: np.ndarray = None
    grid: Grid = None
    diagnostics: dict = field(default_factory=dict)


@dataclass
class InteriorResult(FreeBoundaryResult):
    plateau: np.ndarray = None
    dmask: np.ndarray = None
    trivial_energy: float = 0.0
    exact_energy: float = 0.0


def minimize_interior(problem: InteriorProblem) -> InteriorResult:
    grid = problem.build_grid()
    form = assemble(grid)
    dmask = geometry.rasterize(problem.D, grid)
    if not dmask.any():
        raise ValueError("D rasterizes to an empty mask")
    from .exterior import _touches_box

    if _touches_box(dmask, margin=1):
        raise ValueError("D must lie strictly inside the box")

    c_meas = _measure_coeff(problem.lam, grid)
    pin = ~dmask  # u = 0 off D, always

    if problem.seed == "core":
        u_init = _core_seed(form, dmask, grid)
    else:
        u_init = np.zeros(grid.shape)

    u, stage_trace, diag = _continuation(
        form, pin, 0.0, c_meas, problem.eps_schedule, u_init,
        problem.pg_tol, problem.max_iter, interior_domain=dmask,
    )

    # exact plateau step: pin {u >= 1 - sigma} (eroded into D) to 1
    plateau = (u >= 1.0 - problem.sigma) & ndimage.binary_erosion(dmask)
    vals = np.where(plateau, 1.0, 0.0)
    u_sharp = solve_harmonic(form, GridFunction(grid, vals, pin | plateau))
    n_D = int(np.count_nonzero(dmask))
    n_P = int(np.count_nonzero(plateau))
    exact = form.energy(u_sharp.values) + c_meas * (n_D - n_P)
    trivial = c_meas * n_D
    relaxed_exact = form.energy(u) + c_meas * (n_D - n_P)
    accepted = exact <= relaxed_exact + 1e-8
    final = u_sharp.values if accepted else u
    gag = form.energy(final)
    diag["set_step"] = {"accepted": bool(accepted), "energy_sharp": exact,
                        "energy_relaxed_support": relaxed_exact}
    diag["plateau_cells"] = n_P
    res = InteriorResult(
        u=GridFunction(grid, final, pin | plateau),
        omega=final > 0,
        pinned=pin,
        energies={"gagliardo": gag, "measure": c_meas * (n_D - n_P),
                  "total": gag + c_meas * (n_D - n_P), "trivial": trivial,
                  "measure_coeff": c_meas},
        diagnostics=diag,
        stage_trace=stage_trace,
    )
    res.plateau = plateau
    res.dmask = dmask
    res.trivial_energy = trivial
    res.exact_energy = exact if accepted else relaxed_exact
    return res


def _core_seed(form, dmask, grid: Grid):
    """Plateau-like warm start: 1 on the deep core, harmonic elsewhere.

    Descent from zero stays trivial, so a nontrivial candidate must be
    seeded; the core is the set deeper than half the mask inradius.
    """
    dist = ndimage.distance_transform_edt(dmask) * grid.h
    core = dist > dist.max() / 2.0
    vals = np.where(core, 1.0, 0.0)
    seeded = solve_harmonic(form, GridFunction(grid, vals, core | ~dmask))
    return seeded.values


def is_nontrivial(problem: InteriorProblem, result: InteriorResult) -> bool:
    """Nontrivial iff the exact energy beats the flat state by a
    relative margin and the plateau is nonempty."""
    delta = 1e-6 * result.trivial_energy
    return bool(
        result.exact_energy < result.trivial_energy - delta
        and result.plateau.any()
    )


def ball_bracket(d: int, r: float):
    """Evaluated threshold bounds for a ball of radius r:
    (2/sqrt(pi)) d^{1/4} 3^{-(d+2)/2} / sqrt(r)  <  Lambda(B_r)  <
    (2/sqrt(pi)) sqrt(d) 2^{(d+3)/2} / sqrt(r)."""
    lo = 2.0 / sqrt(pi) * d**0.25 * 3.0 ** (-(d + 2) / 2) / sqrt(r)
    hi = 2.0 / sqrt(pi) * sqrt(d) * 2.0 ** ((d + 3) / 2) / sqrt(r)
    return lo, hi


def measure_lower_bound(d: int, volume: float) -> float:
    """Volume-based lower bound for the threshold of any domain."""
    from math import gamma

    return (
        2.0
        / sqrt(pi)
        * d**0.25
        * pi**0.25
        / (volume ** (1.0 / (2 * d)) * gamma(d / 2 + 1) ** (1.0 / (2 * d))
           * 3.0 ** ((d + 2) / 2))
    )


def bernoulli_constant(D, h: float, tol: float = 0.02, bracket=None,
                       box=None, **problem_kwargs) -> BernoulliEstimate:
    """Threshold estimate by bisection on lambda^2.

    Every probe is a full relaxed minimization plus the nontriviality
    test; the admissible-lambda set is connected, so classifications
    must be monotone across probes and a flip-flop aborts.
    """
    if bracket is None:
        if isinstance(D, geometry.Ball):
            blo, bhi = ball_bracket(D.d, D.radius)
            bracket = (0.98 * blo, 1.02 * bhi)
        else:
            bracket = (0.05, 20.0)
    lam_lo, lam_hi = float(bracket[0]), float(bracket[1])
    if lam_lo >= lam_hi:
        raise ValueError("bracket invalid")

    probes = []

    def probe(lam):
        pr = InteriorProblem(D=D, lam=lam, h=h, box=box, **problem_kwargs)
        res = minimize_interior(pr)
        nt = is_nontrivial(pr, res)
        probes.append({
            "lam": float(lam),
            "energy": float(res.exact_energy),
            "trivial_energy": float(res.trivial_energy),
            "nontrivial": bool(nt),
        })
        return nt, res

    nt_lo, _ = probe(lam_lo)
    nt_hi, res_hi = probe(lam_hi)
    if nt_lo or not nt_hi:
        raise ValueError("bracket invalid")
    plateau = res_hi.plateau
    grid = res_hi.u.grid
    while lam_hi - lam_lo > tol * lam_hi:
        mid = sqrt((lam_lo**2 + lam_hi**2) / 2.0)
        nt, res = probe(mid)
        if nt:
            lam_hi = mid
            plateau = res.plateau
        else:
            lam_lo = mid
    _check_monotone(probes)
    return BernoulliEstimate(
        lambda_lo=lam_lo,
        lambda_hi=lam_hi,
        lambda_hat=0.5 * (lam_lo + lam_hi),
        probes=probes,
        plateau=plateau,
        grid=grid,
        diagnostics={"tol": tol, "h": h},
    )


def _check_monotone(probes):
    by_lam = sorted(probes, key=lambda p: p["lam"])
    flags = [p["nontrivial"] for p in by_lam]
    if any(a and not b for a, b in zip(flags, flags[1:])):
        raise RuntimeError(
            "bisection flip-flop: nontriviality not monotone in lambda; "
            f"probes: {[(p['lam'], p['nontrivial']) for p in by_lam]}"
        )


# ---------------------------------------------------------------------------
# inequality checks
# ---------------------------------------------------------------------------


def isoperimetric_check(D, h: float, tol: float = 0.02, slack: float = 0.05,
                        **kwargs) -> dict:
    """Threshold of D against the ball of equal area (d = 2)."""
    vol = geometry.area(D)
    ball = geometry.Ball((0.0, 0.0), sqrt(vol / pi))
    est_D = bernoulli_constant(D, h=h, tol=tol, **kwargs)
    est_B = bernoulli_constant(ball, h=h, tol=tol, **kwargs)
    ok = est_D.lambda_hat >= est_B.lambda_hat * (1.0 - slack)
    return {"ok": bool(ok), "lambda_D": est_D.lambda_hat,
            "lambda_ball": est_B.lambda_hat, "ball_radius": ball.radius,
            "estimates": (est_D, est_B)}


def inradius_bound_check(D, h: float, tol: float = 0.02, slack: float = 0.05,
                         **kwargs) -> dict:
    """Both evaluated inradius/volume bounds against the bisection estimate."""
    r = geometry.inradius(D)
    upper = 2.0 / sqrt(pi) * sqrt(2.0) * 2.0**2.5 / sqrt(r)
    lower = measure_lower_bound(2, geometry.area(D))
    est = bernoulli_constant(D, h=h, tol=tol, **kwargs)
    ok = (est.lambda_hat <= upper * (1.0 + slack)
          and est.lambda_hat >= lower * (1.0 - slack))
    return {"ok": bool(ok), "lambda_hat": est.lambda_hat, "upper": upper,
            "lower": lower, "estimate": est}
