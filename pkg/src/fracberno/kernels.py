"""Closed-form analytic objects: normalization constants, the Poisson
kernel of the upper half space, harmonic extension by quadrature, the
half-space square-root profile, the explicit radial potential of the
unit ball and its boundary rate, and the resulting upper bound for the
spectral Bernoulli constant of balls.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gamma, pi, sqrt

import numpy as np
from scipy.integrate import quad

from .grids import GridFunction


def normalization_constant(d: int) -> float:
    """A_d = Gamma((d+1)/2) * pi^{-(d+1)/2} / 2, the kernel normalization
    that makes the operator's Fourier symbol |xi|."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return gamma((d + 1) / 2) * pi ** (-(d + 1) / 2) / 2.0


def rate_constant(d: int) -> float:
    """C_0 = 2 sqrt(2) Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)), the
    square-root rate of the radial potential at the unit sphere."""
    if d < 2:
        raise ValueError("rate constant requires d >= 2")
    return 2.0 * sqrt(2.0) * gamma(d / 2) / (sqrt(pi) * gamma((d - 1) / 2))


def profile_I_at_e1(d: int) -> float:
    """I(e1) = sqrt(pi) Gamma((d-1)/2) / (2 Gamma(d/2)), taken analytically."""
    if d < 2:
        raise ValueError("profile requires d >= 2")
    return sqrt(pi) * gamma((d - 1) / 2) / (2.0 * gamma(d / 2))


def profile_I(y, d: int) -> float:
    """Radial integral I(y) for |y| > 1.

    The integrand has a b^{-1/2} endpoint singularity; the substitution
    b = s^2 removes it exactly, after which adaptive quadrature applies.
    For d = 2 the closed form is arctan(1/sqrt(|y|^2 - 1)).
    """
    R = float(np.linalg.norm(y)) if np.ndim(y) else float(y)
    if R <= 1.0:
        raise ValueError("profile_I requires |y| > 1")
    beta = R * R - 1.0
    c = gamma((d - 1) / 2) / (2.0 * sqrt(pi) * gamma(d / 2))
    expo = (d - 2) / 2.0

    def f(s):
        core = 1.0 - beta * s * s
        if core < 0.0:
            core = 0.0
        return 2.0 * core**expo / (1.0 + s * s)

    val, _ = quad(f, 0.0, 1.0 / sqrt(beta), limit=200)
    return c * R ** (2 - d) * val


def profile_j_radial(rho: float, d: int) -> float:
    """j as a function of the distance rho = |y + e1| to the center -e1."""
    if rho <= 1.0:
        return 1.0
    return profile_I(rho, d) / profile_I_at_e1(d)


def profile_j(y, d: int) -> float:
    """j(y): equals 1 on the closed unit ball about -e1, harmonic outside,
    vanishing at infinity; radial about -e1."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    e1 = np.zeros(d)
    e1[0] = 1.0
    return profile_j_radial(float(np.linalg.norm(y + e1)), d)


def q1(y, d: int) -> float:
    """q1(y) = 1 - j(y); vanishes on the closed unit ball about -e1."""
    return 1.0 - profile_j(y, d)


def q1_sqrt_rate(d: int, t_grid) -> float:
    """Fitted square-root rate of q1 along e1 with t -> 0 extrapolation.

    Least squares of q1(t e1) against sqrt(t) over the grid, then the
    one-sided limit is recovered from the two smallest t values by
    removing the leading sqrt(t) correction of the local slope.
    """
    t = np.sort(np.asarray(t_grid, dtype=float))
    if len(t) < 5 or t[0] <= 0.0 or t[-1] > 0.1:
        raise ValueError("t_grid must have >= 5 points in (0, 0.1]")
    if np.any(np.diff(t) <= 0):
        raise ValueError("degenerate t_grid (repeated points)")
    e1 = np.zeros(d)
    e1[0] = 1.0
    q = np.array([q1(tt * e1, d) for tt in t])
    rt = np.sqrt(t)
    _c_ls = float(np.sum(q * rt) / np.sum(t))  # diagnostic fit, not returned
    c1, c2 = q[0] / rt[0], q[1] / rt[1]
    slope = (c2 - c1) / (rt[1] - rt[0])
    return float(c1 - slope * rt[0])


def q1_boundary_domination_check(d: int, samples, margin=1e-3, slack=1e-4):
    """Verify q1(y) <= C0 * dist(y, B1(-e1))^{1/2} on the samples.

    Returns (ok, max_ratio). Samples inside the ball (closer than the
    margin) are rejected.
    """
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    e1 = np.zeros(d)
    e1[0] = 1.0
    c0 = rate_constant(d)
    dists = np.linalg.norm(pts + e1, axis=1) - 1.0
    if np.any(dists < margin):
        raise ValueError("sample inside or too close to the unit ball")
    ratios = np.array(
        [q1(p, d) / (c0 * sqrt(dd)) for p, dd in zip(pts, dists)]
    )
    return bool(np.all(ratios <= 1.0 + slack)), float(ratios.max())


def spectral_ball_upper_bound(d: int, r: float) -> float:
    """Upper bound c~_d / sqrt(r) for the spectral Bernoulli constant of
    a ball of radius r, from the explicit radial subsolution: the slope
    t = (1 - j(e1))^{-1} scales the profile to vanish on the boundary of
    the double ball, and the bound is sqrt(2) t C0 / sqrt(r)."""
    if d < 2:
        raise ValueError("spectral bound requires d >= 2")
    if r <= 0:
        raise ValueError("radius must be positive")
    t = 1.0 / (1.0 - profile_j_radial(2.0, d))
    return sqrt(2.0) * t * rate_constant(d) / sqrt(r)


def ball_constant(d: int) -> float:
    """c~_d = spectral_ball_upper_bound at r = 1; c~_2 = 6/pi."""
    return spectral_ball_upper_bound(d, 1.0)


@dataclass(frozen=True)
class KernelConstants:
    d: int
    A_d: float
    C0: float
    c_tilde: float
    I_e1: float

    @classmethod
    def for_dimension(cls, d: int) -> "KernelConstants":
        return cls(
            d=d,
            A_d=normalization_constant(d),
            C0=rate_constant(d) if d >= 2 else float("nan"),
            c_tilde=ball_constant(d) if d >= 2 else float("nan"),
            I_e1=profile_I_at_e1(d) if d >= 2 else float("nan"),
        )


# ---------------------------------------------------------------------------
# Poisson kernel and harmonic extension
# ---------------------------------------------------------------------------


def poisson_kernel(x, y: float, d: int = None) -> float:
    """P(x, y) = 2 A_d y / (|x|^2 + y^2)^{(d+1)/2} for y > 0."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if d is None:
        d = len(x)
    if y <= 0:
        raise ValueError("height y must be positive")
    r2 = float(np.sum(x * x))
    return 2.0 * normalization_constant(d) * y / (r2 + y * y) ** ((d + 1) / 2)


def poisson_kernel_grid(xs: np.ndarray, y: float, d: int) -> np.ndarray:
    """Vectorized kernel on squared radii; xs holds |x|^2 values."""
    if y <= 0:
        raise ValueError("height y must be positive")
    return 2.0 * normalization_constant(d) * y / (xs + y * y) ** ((d + 1) / 2)


def harmonic_extension(u: GridFunction, x, y: float) -> float:
    """Harmonic extension of a compactly supported grid function.

    Midpoint-rule quadrature of the Poisson integral over the grid box;
    the function vanishes off the grid by convention.
    """
    if y == 0:
        raise ValueError("evaluate trace directly")
    g = u.grid
    x = np.atleast_1d(np.asarray(x, dtype=float))
    pts = g.flat_centers()
    r2 = np.sum((pts - x) ** 2, axis=1)
    P = poisson_kernel_grid(r2, abs(y), g.d)
    return float(np.sum(P * u.values.ravel()) * g.cell_volume)


# ---------------------------------------------------------------------------
# half-space profile psi(x) = sqrt(max(x_1, 0)) and its extension
# ---------------------------------------------------------------------------


def half_space_profile(x) -> np.ndarray:
    """psi(x) = x_1^{1/2} on {x_1 > 0}, zero elsewhere."""
    x = np.asarray(x, dtype=float)
    x1 = x[..., 0] if x.ndim > 1 else np.atleast_1d(x)[0]
    return np.sqrt(np.maximum(x1, 0.0))


def half_space_extension(x, y: float, d: int = 1, half_width: float = 50.0):
    """Harmonic extension Psi of psi by truncated Poisson quadrature.

    Returns (value, tail_bound). The integrand grows like sqrt(z_1)
    while the kernel decays like |z|^{-d-1}, so truncating at L gives a
    tail below 2 A_d y 2^{d+1} omega_{d-1} * 2 / sqrt(L) for |x| <= L/2.
    """
    if y == 0:
        raise ValueError("evaluate trace directly")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(x) != d:
        raise ValueError("point dimension mismatch")
    A = normalization_constant(d)
    ay = abs(y)
    L = float(half_width)
    if d == 1:

        def f(z):
            return poisson_kernel_grid(np.asarray((x[0] - z) ** 2), ay, 1) * sqrt(z)

        val, _ = quad(f, 0.0, L, limit=400)
    elif d == 2:
        from scipy.integrate import dblquad

        def f(z2, z1):
            r2 = (x[0] - z1) ** 2 + (x[1] - z2) ** 2
            return 2.0 * A * ay / (r2 + ay * ay) ** 1.5 * sqrt(z1)

        val, _ = dblquad(f, 0.0, L, -L, L, epsabs=1e-8, epsrel=1e-8)
    else:
        raise ValueError("extension quadrature implemented for d <= 2")
    omega = 2.0 * pi ** (d / 2) / gamma(d / 2)
    tail = 2.0 * A * ay * 2 ** (d + 1) * omega * 2.0 / sqrt(L)
    return float(val), float(tail)
