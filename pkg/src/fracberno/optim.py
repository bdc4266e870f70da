"""Projected descent with Barzilai-Borwein steps and a monotone guard."""
from __future__ import annotations

import numpy as np


def projected_descent(fun, project, u0, alpha0, pg_tol=1e-6, max_iter=4000,
                      alpha_bounds=(1e-10, 1e6), stall_steps=30):
    """Minimize fun over the projected set starting from u0.

    fun(u) -> (value, gradient); project(u) -> feasible point (box clip
    plus pinned-cell reset). BB steps are halved until the energy does
    not increase, so the recorded energy trace is nonincreasing (up to
    1e-14 relative slack). Terminates on the unit-step projected
    gradient, on a step collapse, or on a long stall.
    """
    u = project(np.asarray(u0, dtype=float))
    F, g = fun(u)
    trace = [F]
    alpha = float(alpha0)
    n_stall = 0
    status = "max_iter"
    pgn = np.inf
    for it in range(max_iter):
        pg = project(u - g) - u
        pgn = float(np.max(np.abs(pg)))
        if pgn <= pg_tol:
            status = "converged"
            break
        a = alpha
        while True:
            u_new = project(u - a * g)
            F_new, g_new = fun(u_new)
            if F_new <= F + 1e-14 * (1.0 + abs(F)) or a < 1e-16:
                break
            a *= 0.5
        if a < 1e-16 and F_new > F:
            status = "step_collapse"
            break
        s = u_new - u
        y = g_new - g
        sy = float(np.sum(s * y))
        if sy > 0:
            alpha = float(np.clip(np.sum(s * s) / sy, *alpha_bounds))
        else:
            alpha = float(alpha0)
        if F - F_new <= 1e-14 * (1.0 + abs(F)):
            n_stall += 1
            if n_stall >= stall_steps:
                u, F, g = u_new, F_new, g_new
                trace.append(F)
                status = "stalled"
                break
        else:
            n_stall = 0
        u, F, g = u_new, F_new, g_new
        trace.append(F)
    return u, {"status": status, "iterations": len(trace) - 1,
               "energy_trace": np.asarray(trace), "final_pg": pgn}
