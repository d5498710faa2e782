"""Command-line front end: fiber, extremal, solve, verify, sweep.

Single results are written as JSON (schema_version field included), sweeps
as CSV.  Config files are plain key=value text or JSON (by extension) and
override command-line flags.  Exit codes: 0 all good, 1 a verification
check failed, 2 usage error, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (ConvergenceError, DegenerateInputError,
                     InfeasibleBranchError, ParameterError)
from .extremal import critical_limit, gn_lower_bound, mass_scaling, minimize_mu
from .fibering import fiber_roots, mu_threshold, s_star
from .functionals import Params
from .grid import NormProfile, RadialFunction, make_grid, norms
from .solvers import (continue_to_critical, dual_branch_scan, dual_h,
                      solve_ground, solve_mp_subcritical)
from .verify import VerifyContext, check_names, run_verification

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Everything one CLI invocation needs; round-trips through key=value
    and JSON config files."""

    command: str = ""
    dim: int = 3
    q: float = 8.0 / 3.0
    p: float = 6.0
    mass: float = 1.0
    mu: float = 1.0
    grid_R: float = 40.0
    grid_M: int = 4000
    tol: float = 1e-8
    p_seq: list = field(default_factory=list)
    out: str = ""
    seed: int = 7
    workers: int = 1
    max_iter: int = 4000
    branch: str = "ground"
    norm_triple: list = field(default_factory=list)
    function_file: str = ""
    mu_grid: str = ""
    mass_grid: str = ""
    only: list = field(default_factory=list)
    skip: list = field(default_factory=list)
    t_lo: float = 2.0
    t_hi: float = 12.0
    t_count: int = 12

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def _parse_value(text: str):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if "," in text:
        return [_parse_value(t) for t in text.split(",") if t.strip()]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def load_config_file(path: str) -> dict:
    """Read a key=value (or JSON, by extension) config file."""
    p = Path(path)
    if not p.exists():
        raise ParameterError(f"config file not found: {path}")
    if p.suffix.lower() == ".json":
        return json.loads(p.read_text())
    out = {}
    for line in p.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"bad config line (expected key=value): {line!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = _parse_value(val)
    return out


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (RadialFunction,)):
        return {"values": obj.values.tolist()}
    if hasattr(obj, "value") and obj.__class__.__name__ in ("FiberCase", "ManifoldSide"):
        return obj.value
    return obj


def _emit(payload: dict, out: str):
    payload = {"schema_version": SCHEMA_VERSION, **_jsonable(payload),
               "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _params(cfg: RunConfig) -> Params:
    return Params(cfg.dim, cfg.q, cfg.p, cfg.mass, cfg.mu)


def _profile_from_config(cfg: RunConfig):
    if cfg.function_file:
        data = json.loads(Path(cfg.function_file).read_text())
        g = make_grid(int(data["N"]), float(data["R"]), int(data["M"]))
        vals = np.asarray(data["values"], dtype=float)
        vals[-1] = 0.0
        u = RadialFunction(g, vals)
        return norms(u, cfg.q, cfg.p)
    if cfg.norm_triple:
        if len(cfg.norm_triple) != 3:
            raise ParameterError("--norms expects three values: grad2,massq,massp")
        A, B, C = map(float, cfg.norm_triple)
        return NormProfile(grad2=A, mass2=cfg.mass, massq=B, massp=C, mass2s=C)
    raise ParameterError("fiber needs --norms A,B,C or --function-file PATH")


def cmd_fiber(cfg: RunConfig) -> int:
    P = _params(cfg)
    prof = _profile_from_config(cfg)
    report = fiber_roots(prof, P)
    _emit({
        "command": "fiber",
        "params": P,
        "profile": prof,
        "case": report.case,
        "t_plus": report.t_plus,
        "t_minus": report.t_minus,
        "t_zero": report.t_zero,
        "s_star": report.s_star,
        "mu_threshold": report.mu_threshold,
    }, cfg.out)
    return 0


def cmd_extremal(cfg: RunConfig) -> int:
    grid = make_grid(cfg.dim, cfg.grid_R, cfg.grid_M)
    P = _params(cfg)
    payload = {"command": "extremal", "params": P}
    if cfg.p_seq:
        res = critical_limit(P, cfg.mass, [float(x) for x in cfg.p_seq], grid,
                             max_iter=cfg.max_iter)
        payload.update({
            "mode": "critical_limit",
            "p_seq": res.p_seq,
            "values": res.values,
            "converged": res.converged,
            "limit": res.limit,
        })
        ok = all(res.converged)
    else:
        res = minimize_mu(P, grid, max_iter=cfg.max_iter)
        payload.update({
            "mode": "minimize",
            "mu_star": res.mu_star,
            "converged": res.converged,
            "iterations": res.iterations,
            "history_tail": res.history[-20:],
            "gn_lower_bound": gn_lower_bound(P),
            "lower_bound_margin": res.mu_star - gn_lower_bound(P),
            "mass_scaling_check": {
                "a_doubled": 2.0 * cfg.mass,
                "predicted": mass_scaling(P, cfg.mass, 2.0 * cfg.mass, res.mu_star),
            },
            "minimizer": res.minimizer,
        })
        ok = res.converged
    _emit(payload, cfg.out)
    return 0 if ok else 3


def cmd_solve(cfg: RunConfig) -> int:
    grid = make_grid(cfg.dim, cfg.grid_R, cfg.grid_M)
    P = _params(cfg)
    try:
        if cfg.branch == "ground":
            res = solve_ground(P, grid, max_iter=cfg.max_iter)
        elif cfg.branch == "mp":
            if P.is_critical:
                p_seq = [float(x) for x in cfg.p_seq] if cfg.p_seq else None
                res = continue_to_critical(P, grid, p_seq=p_seq, max_iter=cfg.max_iter)
            else:
                res = solve_mp_subcritical(P, grid, max_iter=cfg.max_iter)
        else:
            raise ParameterError("--branch must be 'ground' or 'mp'")
    except (InfeasibleBranchError, ConvergenceError, DegenerateInputError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    _emit({
        "command": "solve",
        "branch": cfg.branch,
        "params": P,
        "energy": res.energy,
        "lambda": res.lam,
        "lambda_projected": res.lam_projected,
        "pohozaev_residual": res.pohozaev,
        "manifold": res.manifold.side,
        "mass": res.profile.mass2,
        "profile": res.profile,
        "converged": res.converged,
        "iterations": res.iterations,
        "u": res.u,
    }, cfg.out)
    return 0 if res.converged else 3


def cmd_verify(cfg: RunConfig) -> int:
    ctx = VerifyContext(N=cfg.dim, q=cfg.q, mass=cfg.mass, seed=cfg.seed)
    only = set(cfg.only) if cfg.only else None
    bad = (set(cfg.only or ()) | set(cfg.skip or ())) - set(check_names())
    if bad:
        raise ParameterError(f"unknown check names: {sorted(bad)}")

    def progress(row):
        flag = "PASS" if row.passed else "FAIL"
        print(f"[{flag}] {row.name}: left={row.left:.10g} right={row.right:.10g} "
              f"margin={row.margin:.4g} ({row.runtime:.2f}s)", flush=True)

    report = run_verification(ctx, only=only, skip=cfg.skip, progress=progress)
    _emit({"command": "verify", "report": report}, cfg.out)
    return 0 if report.all_passed else 1


def _parse_grid_spec(spec: str):
    lo, hi, n = spec.split(":")
    return np.linspace(float(lo), float(hi), int(n))


def _sweep_row(args):
    (N, q, p, a, mu, R, M, max_iter) = args
    grid = make_grid(N, R, M)
    P = Params(N, q, p, a, mu)
    row = {"N": N, "q": q, "p": p, "mass": a, "mu": mu}
    try:
        g = solve_ground(P, grid, max_iter=max_iter)
        row.update(m_plus=g.energy, lambda_plus=g.lam, ground_converged=g.converged)
    except (InfeasibleBranchError, ConvergenceError, DegenerateInputError) as exc:
        row.update(m_plus=float("nan"), lambda_plus=float("nan"),
                   ground_converged=False, ground_error=str(exc))
    try:
        if P.is_critical:
            m = continue_to_critical(P, grid, m_plus=row.get("m_plus", -np.inf),
                                     gap_margin=-np.inf, max_iter=max_iter)
        else:
            m = solve_mp_subcritical(P, grid, max_iter=max_iter)
        row.update(m_minus=m.energy, lambda_minus=m.lam, mp_converged=m.converged)
    except (InfeasibleBranchError, ConvergenceError, DegenerateInputError) as exc:
        row.update(m_minus=float("nan"), lambda_minus=float("nan"),
                   mp_converged=False, mp_error=str(exc))
    return row


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.mu_grid and not cfg.mass_grid:
        raise ParameterError("sweep needs --mu-grid and/or --mass-grid (lo:hi:n)")
    mus = _parse_grid_spec(cfg.mu_grid) if cfg.mu_grid else [cfg.mu]
    masses = _parse_grid_spec(cfg.mass_grid) if cfg.mass_grid else [cfg.mass]
    grid = make_grid(cfg.dim, cfg.grid_R, cfg.grid_M)
    P0 = Params(cfg.dim, cfg.q, cfg.p, float(masses[0]), 0.0)

    # threshold estimate shared by every row
    ext = minimize_mu(P0, grid, max_iter=cfg.max_iter)
    mu_star_1 = ext.mu_star  # at mass = masses[0]

    # one amplitude walk serves all rows: the branch is coupling-independent
    scan = None
    try:
        scan = dual_branch_scan(cfg.dim, cfg.q, float(masses[0]), 1.0,
                                np.geomspace(cfg.t_lo, cfg.t_hi, cfg.t_count), grid)
    except ConvergenceError:
        pass

    jobs = [(cfg.dim, cfg.q, cfg.p, float(a), float(mu),
             cfg.grid_R, cfg.grid_M, cfg.max_iter)
            for a in masses for mu in mus]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]

    gq = cfg.dim * (cfg.q - 2.0) / (2.0 * cfg.q)
    for row in rows:
        row["mu_star_estimate"] = mass_scaling(P0, float(masses[0]), row["mass"], mu_star_1)
        if scan is not None:
            zeros = 0
            pts = [pt for pt in scan.points
                   if 0.98 * cfg.t_lo <= pt.t <= 1.02 * cfg.t_hi]
            hs = [dual_h(pt.t, pt.v_norm_q, cfg.dim, cfg.q, row["mass"], row["mu"])
                  for pt in pts]
            zeros = int(sum(1 for h1, h2 in zip(hs, hs[1:]) if h1 * h2 < 0))
            row["dual_zero_count"] = zeros
        else:
            row["dual_zero_count"] = ""
    fieldnames = ["N", "q", "p", "mass", "mu", "m_plus", "lambda_plus",
                  "ground_converged", "m_minus", "lambda_minus", "mp_converged",
                  "mu_star_estimate", "dual_zero_count", "ground_error", "mp_error"]
    sink = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    try:
        writer = csv.DictWriter(sink, fieldnames=fieldnames, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v)
                             for k, v in row.items()})
    finally:
        if cfg.out:
            sink.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pohozaev",
        description="fibering maps, extremal couplings and normalized solutions "
                    "of the combined-nonlinearity Schrodinger equation",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=3, help="spatial dimension N >= 3")
    common.add_argument("--q", type=float, default=8.0 / 3.0, help="subcritical exponent")
    common.add_argument("--p", type=float, default=6.0, help="upper exponent (<= 2N/(N-2))")
    common.add_argument("--mass", type=float, default=1.0, help="prescribed squared L2 mass")
    common.add_argument("--mu", type=float, default=1.0, help="coupling of the q-term")
    common.add_argument("--grid-R", type=float, default=40.0, dest="grid_R")
    common.add_argument("--grid-M", type=int, default=4000, dest="grid_M")
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--p-seq", type=str, default="", dest="p_seq",
                        help="comma-separated exponents increasing to 2*")
    common.add_argument("--out", type=str, default="")
    common.add_argument("--seed", type=int, default=7)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--max-iter", type=int, default=4000, dest="max_iter")
    common.add_argument("--config", type=str, default="",
                        help="key=value or JSON config file; overrides flags")

    f = sub.add_parser("fiber", parents=[common], help="classify a fiber map")
    f.add_argument("--norms", type=str, default="", dest="norm_triple",
                   help="explicit triple grad2,massq,massp")
    f.add_argument("--function-file", type=str, default="", dest="function_file",
                   help="JSON file with N, R, M, values")

    sub.add_parser("extremal", parents=[common],
                   help="extremal coupling by quotient minimization "
                        "(give --p-seq for the critical limit)")

    s = sub.add_parser("solve", parents=[common], help="normalized solutions")
    s.add_argument("--branch", choices=["ground", "mp"], default="ground")

    v = sub.add_parser("verify", parents=[common], help="run the verification checklist")
    v.add_argument("--only", type=str, default="", help="comma-separated check names")
    v.add_argument("--skip", type=str, default="", help="comma-separated check names")
    v.add_argument("--list-checks", action="store_true", dest="list_checks")

    w = sub.add_parser("sweep", parents=[common], help="branch data over (mass, mu) grids")
    w.add_argument("--mu-grid", type=str, default="", dest="mu_grid", help="lo:hi:n")
    w.add_argument("--mass-grid", type=str, default="", dest="mass_grid", help="lo:hi:n")
    w.add_argument("--t-lo", type=float, default=2.0, dest="t_lo")
    w.add_argument("--t-hi", type=float, default=12.0, dest="t_hi")
    w.add_argument("--t-count", type=int, default=12, dest="t_count")
    return ap


def _config_from_args(args) -> RunConfig:
    d = vars(args).copy()
    d.pop("list_checks", None)
    cfg_path = d.pop("config", "")
    for key in ("p_seq", "only", "skip", "norm_triple"):
        if key in d:
            d[key] = [_parse_value(x) for x in d[key].split(",") if x.strip()] \
                if isinstance(d[key], str) and d[key] else ([] if not d[key] else d[key])
    cfg = RunConfig.from_dict(d)
    if cfg_path:
        overrides = load_config_file(cfg_path)
        merged = cfg.to_dict()
        merged.update(overrides)
        cfg = RunConfig.from_dict(merged)
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "list_checks", False):
        for name in check_names():
            print(name)
        return 0
    try:
        cfg = _config_from_args(args)
        handler = {"fiber": cmd_fiber, "extremal": cmd_extremal,
                   "solve": cmd_solve, "verify": cmd_verify,
                   "sweep": cmd_sweep}[cfg.command]
        return handler(cfg)
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, InfeasibleBranchError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
