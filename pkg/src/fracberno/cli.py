"""Command-line surface: subcommands over JSON configs and domain files,
CSV/JSON outputs at 12 significant digits, and the acceptance-suite
driver. Exit codes: 0 pass, 1 criterion failure, 2 config error,
3 infrastructure error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, geometry, kernels
from .grids import Grid


class ConfigError(ValueError):
    pass


def _fmt(x):
    """12-significant-digit rounding for stable, diff-able reports;
    non-finite values become null to keep the JSON strict."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.12g}") if np.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return _fmt(x.tolist())
    if isinstance(x, dict):
        return {k: _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def write_report(path, payload: dict, timing: dict = None):
    """Deterministic JSON report; timing lives under its own key so the
    remainder is byte-stable across reruns."""
    body = _fmt(payload)
    if timing is not None:
        body["timing"] = {k: float(v) for k, v in timing.items()}
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(body, fh, indent=1, sort_keys=True)
        fh.write("\n")


def write_csv(path, header, rows):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                f"{v:.12g}" if isinstance(v, (float, np.floating)) else str(v)
                for v in row) + "\n")


def thread_count() -> int:
    env = os.environ.get("FRACBERNO_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("FRACBERNO_THREADS must be an integer")
    return 1


def load_domain(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"domain file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"domain file is not valid JSON: {exc}")
    try:
        return geometry.domain_from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad domain file {path}: {exc}")


def parse_config(path, schema: dict, required: tuple) -> dict:
    """Strict config parsing: unknown keys, missing keys, and bad types
    are rejected with the offending field named."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in raw:
        if key not in schema:
            raise ConfigError(f"unknown key {key!r}")
    for key in required:
        if key not in raw:
            raise ConfigError(f"missing key {key!r}")
    out = {}
    for key, (kind, default, check) in schema.items():
        if key in raw:
            val = raw[key]
            if kind is float and isinstance(val, int):
                val = float(val)
            if not isinstance(val, kind):
                raise ConfigError(f"bad type for {key!r}")
            if check is not None and not check(val):
                raise ConfigError(f"invalid value for {key!r}")
            out[key] = val
        else:
            out[key] = default
    return out


_EXT_SCHEMA = {
    "K": (dict, None, None),
    "lambda": (float, None, lambda v: v > 0),
    "h": (float, None, lambda v: v > 0),
    "box": (list, None, None),
    "eps_schedule": (list, list((0.2, 0.1, 0.05, 0.02, 0.01)), None),
    "tau": (float, 0.01, lambda v: v > 0),
    "pg_tol": (float, 1e-6, lambda v: v > 0),
    "threads": (int, None, lambda v: v >= 1),
}

_INT_SCHEMA = {
    "D": (dict, None, None),
    "lambda": (float, None, lambda v: v > 0),
    "h": (float, None, lambda v: v > 0),
    "box": (list, None, None),
    "eps_schedule": (list, list((0.2, 0.1, 0.05, 0.02, 0.01)), None),
    "sigma": (float, 0.02, lambda v: v > 0),
    "pg_tol": (float, 1e-6, lambda v: v > 0),
    "seed": (str, "core", lambda v: v in ("core", "zero")),
    "threads": (int, None, lambda v: v >= 1),
}


def _box_from_config(cfg):
    if cfg.get("box") is None:
        return None
    lo, hi = cfg["box"]
    try:
        Grid.from_box(lo, hi, cfg["h"])  # validates divisibility
    except ValueError as exc:
        raise ConfigError(str(exc))
    return (tuple(lo), tuple(hi))


def cmd_constants(args):
    d = args.d
    consts = kernels.KernelConstants.for_dimension(d)
    payload = {"d": d, "A_d": consts.A_d, "C0": consts.C0,
               "c_tilde": consts.c_tilde, "I_e1": consts.I_e1}
    print(json.dumps(_fmt(payload), indent=1, sort_keys=True))
    return 0


def cmd_solve_exterior(args):
    from . import exterior

    cfg = parse_config(args.config, _EXT_SCHEMA, required=("K", "lambda", "h"))
    K = geometry.domain_from_json(cfg["K"])
    t0 = time.time()
    problem = exterior.ExteriorProblem(
        K=K, lam=cfg["lambda"], h=cfg["h"], box=_box_from_config(cfg),
        eps_schedule=tuple(cfg["eps_schedule"]), tau=cfg["tau"],
        pg_tol=cfg["pg_tol"])
    res = exterior.minimize_exterior(problem)
    rates = exterior.boundary_rates(res, M=args.directions)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    res.u.save_csv(out / "u.csv", out / "u_header.json")
    np.savetxt(out / "omega.csv", res.omega.astype(int), fmt="%d", delimiter=",")
    write_csv(out / "boundary.csv", ["theta", "r", "lam_hat", "residual"],
              zip(rates["theta"], rates["radius"], rates["lam_hat"],
                  rates["residual"]))
    write_report(out / "report.json", {
        "command": "solve-exterior",
        "version": __version__,
        "inputs": {k: cfg[k] for k in sorted(cfg) if cfg[k] is not None},
        "threads": cfg["threads"] or thread_count(),
        "energies": res.energies,
        "stage_trace": res.stage_trace,
        "diagnostics": res.diagnostics,
        "mean_rate": (float(np.nanmean(rates["lam_hat"]))
                      if np.isfinite(rates["lam_hat"]).any() else None),
    }, timing={"seconds": time.time() - t0})
    return 0


def cmd_solve_interior(args):
    from . import interior

    cfg = parse_config(args.config, _INT_SCHEMA, required=("D", "lambda", "h"))
    D = geometry.domain_from_json(cfg["D"])
    t0 = time.time()
    problem = interior.InteriorProblem(
        D=D, lam=cfg["lambda"], h=cfg["h"], box=_box_from_config(cfg),
        eps_schedule=tuple(cfg["eps_schedule"]), sigma=cfg["sigma"],
        pg_tol=cfg["pg_tol"], seed=cfg["seed"])
    res = interior.minimize_interior(problem)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    res.u.save_csv(out / "u.csv", out / "u_header.json")
    np.savetxt(out / "plateau.csv", res.plateau.astype(int), fmt="%d",
               delimiter=",")
    write_report(out / "report.json", {
        "command": "solve-interior",
        "version": __version__,
        "inputs": {k: cfg[k] for k in sorted(cfg) if cfg[k] is not None},
        "threads": cfg["threads"] or thread_count(),
        "energies": res.energies,
        "exact_energy": res.exact_energy,
        "trivial_energy": res.trivial_energy,
        "nontrivial": interior.is_nontrivial(problem, res),
        "stage_trace": res.stage_trace,
        "diagnostics": res.diagnostics,
    }, timing={"seconds": time.time() - t0})
    return 0


def cmd_bernoulli_constant(args):
    from . import interior

    D = load_domain(args.domain)
    t0 = time.time()
    est = interior.bernoulli_constant(D, h=args.h, tol=args.tol)
    out = Path(args.out)
    write_csv(out / "probes.csv",
              ["lambda", "energy", "trivial_energy", "nontrivial"],
              [(p["lam"], p["energy"], p["trivial_energy"],
                int(p["nontrivial"])) for p in est.probes])
    write_report(out / "estimate.json", {
        "command": "bernoulli-constant",
        "version": __version__,
        "domain": geometry.domain_to_json(D),
        "threads": thread_count(),
        "lambda_lo": est.lambda_lo,
        "lambda_hi": est.lambda_hi,
        "lambda_hat": est.lambda_hat,
        "tol": args.tol,
        "h": args.h,
        "probe_count": len(est.probes),
    }, timing={"seconds": time.time() - t0})
    return 0


def cmd_spectral_solve(args):
    from . import spectral

    D = load_domain(args.domain)
    if args.lam <= 0:
        raise ConfigError("invalid value for 'lambda'")
    t0 = time.time()
    run = spectral.beurling_grow(D, args.lam, h=args.h)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "khat.json", "w") as fh:
        json.dump(_fmt(geometry.domain_to_json(run.K_hat)), fh, indent=1,
                  sort_keys=True)
    write_csv(out / "rates.csv", ["theta", "lam_hat", "residual"],
              zip(run.rates.theta, run.rates.lam_hat, run.rates.residual))
    write_report(out / "report.json", {
        "command": "spectral-solve",
        "version": __version__,
        "domain": geometry.domain_to_json(D),
        "threads": thread_count(),
        "lambda": args.lam,
        "h": args.h,
        "sup_ratio": run.rates.sup_ratio,
        "sweeps": run.diagnostics["sweeps"],
        "solves": run.diagnostics["solves"],
        "iterate_count": len(run.iterates),
    }, timing={"seconds": time.time() - t0})
    return 0


def cmd_lambda_s(args):
    from . import spectral

    D = load_domain(args.domain)
    t0 = time.time()
    est = spectral.lambda_s(D, h=args.h, tol=args.tol)
    write_report(Path(args.out) / "lambda_s.json", {
        "command": "lambda-s",
        "version": __version__,
        "domain": geometry.domain_to_json(D),
        "threads": thread_count(),
        "lo": est.lo,
        "hi": est.hi,
        "estimate": est.estimate,
        "best_seed_radius": est.best_seed_radius,
        "probes": est.probes,
        "tol": args.tol,
        "h": args.h,
    }, timing={"seconds": time.time() - t0})
    return 0


def cmd_bm_verify(args):
    from . import spectral

    D0 = load_domain(args.d0)
    D1 = load_domain(args.d1)
    try:
        s_values = [float(s) for s in args.s.split(",")]
    except ValueError:
        raise ConfigError("bad --s list")
    if any(not 0 < s < 1 for s in s_values):
        raise ConfigError("invalid value for 's'")
    t0 = time.time()
    report = spectral.bm_verify(D0, D1, s_values, h=args.h, tol=args.tol)
    report.update({"command": "bm-verify", "version": __version__,
                   "threads": thread_count()})
    write_report(Path(args.out) / "bm_report.json", report,
                 timing={"seconds": time.time() - t0})
    return 0 if report["ok"] else 1


def cmd_urysohn_verify(args):
    from . import spectral

    D = load_domain(args.domain)
    t0 = time.time()
    report = spectral.urysohn_verify(D, h=args.h, tol=args.tol)
    report.update({"command": "urysohn-verify", "version": __version__,
                   "threads": thread_count()})
    write_report(Path(args.out) / "urysohn_report.json", report,
                 timing={"seconds": time.time() - t0})
    return 0 if report["ok"] else 1


def cmd_verify(args):
    from . import acceptance

    suites = args.suite.split(",")
    known = set(acceptance.CRITERIA) | {"all"}
    for s in suites:
        if s not in known:
            print(f"unknown suite {s!r}; known: {sorted(known)}", file=sys.stderr)
            return 3
    try:
        results = acceptance.run_suite(suites, fast=args.fast)
    except acceptance.InfrastructureError as exc:
        print(f"infrastructure error: {exc}", file=sys.stderr)
        return 3
    payload = {
        "command": "verify",
        "version": __version__,
        "threads": thread_count(),
        "fast": bool(args.fast),
        "criteria": [
            {k: r[k] for k in ("name", "passed", "details")} for r in results
        ],
        "all_passed": all(r["passed"] for r in results),
    }
    write_report(Path(args.out) / "verify_report.json", payload,
                 timing={r["name"]: r["seconds"] for r in results})
    for r in results:
        print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}  "
              f"({r['seconds']:.1f}s)")
    return 0 if payload["all_passed"] else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="fracberno",
        description="Bernoulli free-boundary problems for the half Laplacian",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="closed-form kernel constants")
    c.add_argument("--d", type=int, required=True)
    c.set_defaults(fn=cmd_constants)

    e = sub.add_parser("solve-exterior", help="exterior free-boundary solve")
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--directions", type=int, default=64)
    e.set_defaults(fn=cmd_solve_exterior)

    i = sub.add_parser("solve-interior", help="interior free-boundary solve")
    i.add_argument("--config", required=True)
    i.add_argument("--out", required=True)
    i.set_defaults(fn=cmd_solve_interior)

    b = sub.add_parser("bernoulli-constant", help="threshold by bisection")
    b.add_argument("--domain", required=True)
    b.add_argument("--tol", type=float, default=0.02)
    b.add_argument("--h", type=float, required=True)
    b.add_argument("--out", default=".")
    b.set_defaults(fn=cmd_bernoulli_constant)

    s = sub.add_parser("spectral-solve", help="grow the compact set at fixed lambda")
    s.add_argument("--domain", required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--h", type=float, required=True)
    s.add_argument("--out", default=".")
    s.set_defaults(fn=cmd_spectral_solve)

    ls = sub.add_parser("lambda-s", help="spectral threshold bracket")
    ls.add_argument("--domain", required=True)
    ls.add_argument("--tol", type=float, default=0.05)
    ls.add_argument("--h", type=float, required=True)
    ls.add_argument("--out", default=".")
    ls.set_defaults(fn=cmd_lambda_s)

    bm = sub.add_parser("bm-verify", help="Brunn-Minkowski inequality check")
    bm.add_argument("--d0", required=True)
    bm.add_argument("--d1", required=True)
    bm.add_argument("--s", default="0.25,0.5,0.75")
    bm.add_argument("--h", type=float, required=True)
    bm.add_argument("--tol", type=float, default=0.05)
    bm.add_argument("--out", default=".")
    bm.set_defaults(fn=cmd_bm_verify)

    u = sub.add_parser("urysohn-verify", help="mean-width comparison check")
    u.add_argument("--domain", required=True)
    u.add_argument("--h", type=float, required=True)
    u.add_argument("--tol", type=float, default=0.05)
    u.add_argument("--out", default=".")
    u.set_defaults(fn=cmd_urysohn_verify)

    v = sub.add_parser("verify", help="run acceptance criteria")
    v.add_argument("--suite", default="all")
    v.add_argument("--fast", action="store_true",
                   help="reduced grids for a quick pass")
    v.add_argument("--out", default=".")
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 3
    except (RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
