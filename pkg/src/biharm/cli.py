"""Command-line interface.

Subcommands: solve (fixed-point iteration, optionally with continuation),
verify (residual battery on a stored profile), shoot (radial ODE integration
and threshold bisection), sweep (cartesian parameter grid in a worker pool).

Exit codes: 0 success / all checks pass; 1 structural error (bad config, I/O,
shape mismatch); 2 solve finished Diverged; 3 verification check failed;
4 shooting bracket not found.  Reports are JSON with floats fixed to 12
significant digits and sorted keys, so identical config and seed give
byte-identical output.  The default output directory is $BIHARM_OUT or
./biharm_out.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from .model import (ConfigError, GridSpec, NonFiniteError, Profile,
                    QuadraticPolynomial, RadialGrid, SolveConfig,
                    load_profile_csv, report_json, save_profile_csv,
                    validate_config)
from .operator import (SphericalReduction, continuation_eps_to_zero,
                       solve_fixed_point)
from . import analysis, shooting, verify

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_CHECK_FAILED = 3
EXIT_NO_BRACKET = 4

PRESETS = ("thm1", "thm2", "thmA-iii", "thmA-iv", "exact-q7")

DEFAULT_THRESHOLDS = {"pde": 1e-2, "integral": 1e-2, "pohozaev": 1e-2}


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("BIHARM_OUT") or "biharm_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def load_preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    ref = resources.files("biharm").joinpath(f"presets/{name}.json")
    return json.loads(ref.read_text())


def _load_config_dict(args) -> dict:
    if getattr(args, "preset", None):
        d = load_preset(args.preset)
    elif getattr(args, "config", None):
        with open(args.config) as f:
            try:
                d = json.load(f)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
    else:
        raise ConfigError("need --config PATH or --preset NAME")
    return d


def _final_stage_config(cfg: SolveConfig) -> SolveConfig:
    """The config whose polynomial the stored profile actually solved."""
    if cfg.continuation is None:
        return cfg
    eps = cfg.continuation.eps_sequence[-1]
    return cfg.replace_poly(cfg.poly.with_eps(cfg.continuation.eps_param, eps))


def _write_trace(path: Path, report) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["iter", "diff_xnorm", "alpha_estimate"])
        for i, (d, a) in enumerate(zip(report.diff_history,
                                       report.alpha_history), start=1):
            w.writerow([i, repr(float(d)), repr(float(a))])


def _poly_values_on(grid, poly):
    if isinstance(grid, RadialGrid):
        return poly.value_radial(grid.r)
    return poly.value_rt(grid.r[:, None], grid.t[None, :])


def _enrich_report(report, prof: Profile, cfg: SolveConfig, limit_poly=None):
    """Attach growth fits, beta, and the decomposition to a solve report.

    Fits run on u = v + P with P the continuation limit when one was used
    (the object the limit statements are about) and the solved polynomial
    otherwise.
    """
    fit_poly = limit_poly if limit_poly is not None else cfg.poly
    g = prof.grid
    u_fit = prof.values + _poly_values_on(g, fit_poly)
    u_solved = prof.values + _poly_values_on(g, cfg.poly)

    def ray_model(t: float) -> str:
        # growth along a ray: quartic term dominates everywhere, otherwise
        # the quadratic coefficient in that direction, otherwise the
        # iterate's own linear growth
        if fit_poly.eps_quartic > 0.0:
            return "power"
        at = fit_poly.a[0] * t * t + fit_poly.a[1] * (1.0 - t * t)
        return "quadratic" if at > 0.0 else "linear"

    fits = []
    try:
        if isinstance(g, RadialGrid):
            fits.append(analysis.fit_growth(g.r, u_fit, ray_model(1.0)).to_dict())
        else:
            for t in (1.0, 0.0):
                r, vals = analysis.ray_values(
                    Profile(grid=g, values=u_fit, symmetry=prof.symmetry), t)
                fits.append(analysis.fit_growth(r, vals, ray_model(t),
                                                direction=t).to_dict())
    except analysis.InsufficientTailError as exc:
        report.beta_note = f"growth fits skipped: {exc}"
    report.growth_fits = fits

    if report.converged:
        up = Profile(grid=g, values=u_solved, symmetry=prof.symmetry)
        try:
            beta, note = analysis.compute_beta(up, cfg.q)
            report.beta = beta
            report.beta_note = note
        except (analysis.NotIntegrableError,
                analysis.InsufficientTailError) as exc:
            report.beta = None
            report.beta_note = str(exc)
        # the decomposition basis is quadratic, so for continuation runs it
        # applies to the limit object v + P_limit, not the quartic stage
        up_fit = Profile(grid=g, values=u_fit, symmetry=prof.symmetry)
        try:
            report.decomposition = analysis.decompose(up_fit, cfg.q,
                                                      beta=report.beta)
        except (analysis.NotIntegrableError, analysis.InsufficientTailError,
                NonFiniteError) as exc:
            report.decomposition = {"error": str(exc)}
    return report


def cmd_solve(args) -> int:
    d = _load_config_dict(args)
    if d.get("command", "solve") != "solve":
        raise ConfigError(
            f"this preset drives the {d.get('command')!r} subcommand, not solve")
    d = {k: v for k, v in d.items() if k != "command"}
    cfg = SolveConfig.from_dict(d)
    if args.seed is not None:
        cfg = SolveConfig.from_dict({**cfg.to_dict(), "seed": args.seed})
    out = _out_dir(args)

    check = validate_config(cfg)
    if check.hard_errors:
        raise ConfigError("; ".join(check.hard_errors))

    if cfg.continuation is not None and not check.gate_failures:
        cont = continuation_eps_to_zero(cfg)
        prof = cont.final_profile
        report = cont.final_report
        report = _enrich_report(report, prof, _final_stage_config(cfg),
                                limit_poly=cont.limit_poly)
        extra = {
            "continuation": {
                "eps_values": list(cont.eps_values),
                "converged": [r.converged for r in cont.reports],
                "iters": [r.iters for r in cont.reports],
                "u_origin": [r.u_origin for r in cont.reports],
                "cauchy_sup_r10": list(cont.cauchy),
            }
        }
        stage_cfg = _final_stage_config(cfg)
    else:
        prof, report, _ = solve_fixed_point(cfg)
        if report.converged:
            report = _enrich_report(report, prof, cfg)
        extra = {}
        stage_cfg = cfg

    u = prof.values + _poly_values_on(prof.grid, stage_cfg.poly)
    save_profile_csv(Profile(grid=prof.grid, values=u, symmetry=prof.symmetry),
                     out / "profile.csv")
    _write_trace(out / "trace.csv", report)
    doc = {"config": cfg.to_dict(), "result": report.to_dict(), **extra,
           "warnings": check.warnings}
    report_json(doc, out / "report.json")
    cfg.to_json(out / "config.json")

    if not report.converged:
        print(f"diverged: {report.diverged_reason}", file=sys.stderr)
        return EXIT_DIVERGED
    print(f"converged in {report.iters} iterations; report in {out}")
    return EXIT_OK


def _check(value, threshold, note=""):
    if value is None:
        return {"status": "not_applicable", "note": note}
    status = "pass" if value < threshold else "fail"
    return {"value": float(value), "threshold": threshold, "status": status,
            "note": note}


def _run_exact_q7(d: dict, out: Path, seed: int) -> int:
    gspec = GridSpec.from_dict(d["grid"])
    g = gspec.build()
    th = d.get("thresholds", {})
    prof = verify.exact_q7_profile(g)
    pde = verify.pde_residual(prof, 7.0)

    class _ZeroPoly:
        c = 0.0

        @staticmethod
        def value_radial(r):
            return np.zeros_like(np.asarray(r, dtype=float))

    integ = verify.integral_residual(prof, 7.0, _ZeroPoly(), n_samples=20,
                                     seed=seed)
    checks = {
        "pde": _check(pde.max_rel, th.get("pde", 1e-3)),
        "integral": _check(integ.max_rel, th.get("integral", 1e-3)),
        "gamma": _check(abs(integ.gamma), th.get("gamma", 1e-2)),
    }
    doc = {"mode": "exact-q7", "q": 7.0, "grid": gspec.to_dict(),
           "checks": checks, "gamma": integ.gamma,
           "pde_window": list(pde.window)}
    report_json(doc, out / "verification.json")
    failed = [k for k, v in checks.items() if v["status"] == "fail"]
    for k, v in checks.items():
        print(f"{k}: {v['status']} ({v.get('value', 'n/a')})")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_verify(args) -> int:
    out = _out_dir(args)
    if args.exact_q7 and not (args.preset or args.config):
        d = load_preset("exact-q7")
        return _run_exact_q7(d, out, args.seed or 0)
    d = _load_config_dict(args)
    if d.get("command", "solve") == "verify":
        return _run_exact_q7(d, out, args.seed or 0)
    d = {k: v for k, v in d.items() if k != "command"}
    cfg = SolveConfig.from_dict(d)
    if args.profile is None:
        raise ConfigError("verify needs --profile PATH (a profile.csv from solve)")
    stage_cfg = _final_stage_config(cfg)
    grid = stage_cfg.build_grid()
    prof = load_profile_csv(args.profile, grid)  # ConfigError on mismatch
    u = prof.values
    if np.min(u) <= 0.0:
        raise ConfigError("stored profile is not strictly positive")
    seed = args.seed if args.seed is not None else cfg.seed
    th = dict(DEFAULT_THRESHOLDS)

    poly = stage_cfg.poly
    pde = verify.pde_residual(prof, cfg.q, eps_quartic=poly.eps_quartic)
    integ = verify.integral_residual(prof, cfg.q, poly, n_samples=20, seed=seed)

    po_value, po_note = None, ""
    if cfg.q > 4.0:
        gamma_offset = 0.0
        if cfg.kernel_variant == "shifted":
            dens = u ** (-cfg.q)
            if isinstance(grid, RadialGrid):
                g0 = dens
            else:
                g0 = SphericalReduction(grid).analyze(dens)[:, 0]
            try:
                coeff, p = analysis.tail_power_fit(grid.r, g0)
            except analysis.InsufficientTailError:
                coeff, p = 0.0, math.inf
            fm = 0.5 * float(np.sum(grid.r**3 * grid.line_w * g0))
            if math.isfinite(p) and p > 4.0:
                fm += coeff * grid.r_max ** (4.0 - p) / (2.0 * (p - 4.0))
            gamma_offset = -fm
        po = verify.pohozaev_residual(prof, cfg.q, poly,
                                      gamma_offset=gamma_offset)
        po_value, po_note = po.residual, po.note
    else:
        po_note = f"NotApplicable: q = {cfg.q:g} (identity checked for q > 4)"

    checks = {
        "positivity": {"status": "pass", "note": "u > 0 on all nodes"},
        "pde": _check(pde.max_rel, th["pde"]),
        "integral": _check(integ.max_rel, th["integral"]),
        "pohozaev": _check(po_value, th["pohozaev"], po_note),
    }
    doc = {"config": cfg.to_dict(), "checks": checks,
           "gamma": integ.gamma, "pde_window": list(pde.window),
           "integral_note": integ.note}
    report_json(doc, out / "verification.json")
    failed = [k for k, v in checks.items() if v["status"] == "fail"]
    for k, v in checks.items():
        print(f"{k}: {v['status']}" + (f" ({v['value']:.3g})"
                                       if "value" in v else ""))
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_shoot(args) -> int:
    out = _out_dir(args)
    if args.preset:
        d = load_preset(args.preset)
        if d.get("command") != "shoot":
            raise ConfigError(f"preset {args.preset!r} does not drive shoot")
        q = d["q"]
        u0 = d.get("u0", 1.0)
        r_end = d.get("r_end", 1e4)
        bisect = d.get("bisect", False)
        w0 = d.get("w0")
        exact_start = d.get("exact_start", False)
    else:
        q, u0, r_end = args.q, args.u0, args.r_end
        bisect, w0, exact_start = args.bisect, args.w0, args.exact_start

    summary = {"q": q, "u0": u0, "r_end": r_end}
    if exact_start:
        u0 = 15.0 ** -0.25
        w0 = 3.0 * 15.0 ** 0.25
        traj = shooting.integrate_radial(7.0, u0, w0, min(r_end, 10.0))
        dev = np.max(np.abs(traj.u - verify.exact_q7_value(traj.r))
                     / verify.exact_q7_value(traj.r))
        summary.update({"q": 7.0, "u0": u0, "w0": w0,
                        "max_rel_deviation_from_closed_form": float(dev),
                        "outcome": traj.outcome})
    elif bisect:
        if q is None or q <= 1.0:
            raise ConfigError("bisect mode needs q > 1")
        res = shooting.bisect_growth_threshold(q, u0, r_end)
        traj = res.trajectory
        diag = shooting.threshold_growth_diagnostics(traj, q)
        summary.update({
            "w0_critical": res.w_crit,
            "bracket": list(res.bracket),
            "outcome": traj.outcome,
            "growth": {k: diag[k] for k in
                       ("model", "target_exponent", "coeff", "exponent",
                        "r_plateau")},
            "n_shots": len(res.history),
        })
        if 1.0 < q < 3.0:
            summary["growth"]["universal_coeff"] = shooting.universal_coefficient(q)
    else:
        if q is None or w0 is None:
            raise ConfigError("single-shot mode needs --q and --w0")
        traj = shooting.integrate_radial(q, u0, w0, r_end)
        summary.update({"w0": w0, "outcome": traj.outcome,
                        "r_stop": traj.r_stop})

    with open(out / "trajectory.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["r", "u", "du", "w", "dw"])
        for row in zip(traj.r, traj.u, traj.du, traj.w, traj.dw):
            w.writerow([repr(float(x)) for x in row])
    report_json(summary, out / "summary.json")
    print(json.dumps({k: v for k, v in summary.items()
                      if k not in ("r_trace",)}, default=str)[:400])
    return EXIT_OK


# -- sweep -------------------------------------------------------------------


def _sweep_point(payload):
    """Run one sweep point; returns an aggregate row.  Never raises."""
    base, q, k1, k2, eps, point_dir = payload
    row = {"q": q, "kappa1": k1, "kappa2": k2, "eps": eps,
           "converged": False, "iters": 0, "beta": "", "alpha": "",
           "exponent_e1": "", "exponent_eperp": "", "error": ""}
    try:
        cfg = SolveConfig.from_dict(base)
        poly = cfg.poly
        poly = QuadraticPolynomial((k1, k2, k2), poly.b, poly.c, eps)
        cfg = SolveConfig.from_dict({**cfg.to_dict(), "q": q,
                                     "poly": poly.to_dict(),
                                     "continuation": None})
        prof, report, _ = solve_fixed_point(cfg)
        row["converged"] = report.converged
        row["iters"] = report.iters
        if report.converged:
            report = _enrich_report(report, prof, cfg)
            row["alpha"] = report.alpha
            row["beta"] = "" if report.beta is None else report.beta
            g = prof.grid
            u = prof.values + _poly_values_on(g, cfg.poly)
            up = Profile(grid=g, values=u, symmetry=prof.symmetry)
            rays = [("exponent_e1", 1.0)] if not isinstance(g, RadialGrid) \
                else [("exponent_e1", None)]
            if not isinstance(g, RadialGrid):
                rays.append(("exponent_eperp", 0.0))
            for key, t in rays:
                if t is None:
                    r, vals = g.r, u
                else:
                    r, vals = analysis.ray_values(up, t)
                fit = analysis.fit_growth(r, vals, "power")
                row[key] = fit.params["exponent"]
        else:
            row["error"] = report.diverged_reason or ""
        pd = Path(point_dir)
        pd.mkdir(parents=True, exist_ok=True)
        report_json({"config": cfg.to_dict(), "result": report.to_dict()},
                    pd / "report.json")
        u = prof.values + _poly_values_on(prof.grid, cfg.poly)
        save_profile_csv(Profile(grid=prof.grid, values=u,
                                 symmetry=prof.symmetry), pd / "profile.csv")
    except Exception as exc:  # per-point isolation: record, never abort
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


SWEEP_COLUMNS = ["q", "kappa1", "kappa2", "eps", "converged", "iters",
                 "beta", "alpha", "exponent_e1", "exponent_eperp", "error"]


def cmd_sweep(args) -> int:
    with open(args.config) as f:
        try:
            sw = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"sweep config is not valid JSON: {exc}") from exc
    try:
        base = sw["base"]
        grid = sw["grid"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"sweep config needs 'base' and 'grid': {exc}") from exc
    out = _out_dir(args)
    qs = [float(x) for x in grid.get("q", [base.get("q", 2.0)])]
    k1s = [float(x) for x in grid.get("kappa1", [1.0])]
    k2s = [float(x) for x in grid.get("kappa2", [1.0])]
    epss = [float(x) for x in grid.get("eps", [0.0])]
    points = sorted((q, k1, k2, e) for q in qs for k1 in k1s
                    for k2 in k2s for e in epss)
    payloads = [
        (base, q, k1, k2, e, str(out / f"point_{i:04d}"))
        for i, (q, k1, k2, e) in enumerate(points)
    ]
    threads = args.threads or min(4, os.cpu_count() or 1)
    if threads > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_point, payloads))
    else:
        rows = [_sweep_point(p) for p in payloads]
    # deterministic ordering by parameter tuple (points were pre-sorted)
    with open(out / "sweep.csv", "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow(row)
    n_ok = sum(1 for r in rows if r["converged"])
    print(f"{len(rows)} points, {n_ok} converged; results in {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="biharm",
        description="Entire solutions of a fourth-order equation with an "
                    "inverse-power nonlinearity, by integral fixed point")
    sub = p.add_subparsers(dest="cmd", required=True)

    ps = sub.add_parser("solve", help="run the fixed-point solver")
    ps.add_argument("--config", help="solve config JSON")
    ps.add_argument("--preset", help=f"built-in preset: {', '.join(PRESETS)}")
    ps.add_argument("--out", help="output directory (default $BIHARM_OUT)")
    ps.add_argument("--seed", type=int, default=None)
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify", help="residual checks on a stored profile")
    pv.add_argument("--config", help="the config the profile was solved with")
    pv.add_argument("--preset", help="verification preset (exact-q7)")
    pv.add_argument("--profile", help="profile.csv written by solve")
    pv.add_argument("--exact-q7", action="store_true",
                    help="run the closed-form battery (same as --preset exact-q7)")
    pv.add_argument("--out", help="output directory")
    pv.add_argument("--seed", type=int, default=None)
    pv.set_defaults(func=cmd_verify)

    ph = sub.add_parser("shoot", help="radial ODE integration / bisection")
    ph.add_argument("--q", type=float)
    ph.add_argument("--u0", type=float, default=1.0)
    ph.add_argument("--w0", type=float, default=None)
    ph.add_argument("--r-end", type=float, default=1e4)
    ph.add_argument("--bisect", action="store_true")
    ph.add_argument("--exact-start", action="store_true",
                    help="start from the closed-form q=7 origin data")
    ph.add_argument("--preset", help="shoot preset (thmA-iv)")
    ph.add_argument("--out", help="output directory")
    ph.set_defaults(func=cmd_shoot)

    pw = sub.add_parser("sweep", help="cartesian parameter sweep")
    pw.add_argument("--config", required=True, help="sweep config JSON")
    pw.add_argument("--out", help="output directory")
    pw.add_argument("--threads", type=int, default=None)
    pw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except shooting.BracketNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_BRACKET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
