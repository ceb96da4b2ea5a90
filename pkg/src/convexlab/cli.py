"""Batch command-line surface: reproducible experiments with serialized reports.

Subcommands: evolve, convexity, scan, carleman, hardy, specfun-selftest.
Reports are JSON (UTF-8, sorted keys, full provenance) plus RFC-4180 CSV with
decimal-17 doubles; the report path also renders a PNG figure next to the CSV
unless --no-figures is given.

Exit codes: 0 all verdicts pass, 1 a mathematical verdict failed,
2 config error, 3 certification (window/quadrature) failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .carleman import (
    CarlemanParams,
    QuadratureError,
    WindowGuardError,
    bump_test_function,
    eqc_quadratic_form,
    mu0,
    recommended_time_nodes,
    verify_carleman,
)
from .commutator import eq1_scan, lambda_scan, turan_scan
from .convexity import TailCertificateError, convexity_report, sample_series
from .evolve import ConfigError, EvolutionConfig, Potential, SupportOverflowError, evolve_free_convolution, evolve_free_spectral, free_evolution_log_abs
from .lattice import Field, LatticeWindow, field_to_csv
from .specfun import log_bessel_i_all, self_test
from .weights import (
    BesselKWeight,
    GaussianWeight,
    InverseBesselWeight,
    LinearWeight,
    weight_to_json_dict,
)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_CONFIG = 2
EXIT_CERTIFICATE = 3

_TOLERANCES = {
    "convexity_tol": 1e-8,
    "tail_certificate": 1e-12,
    "engine_cross_check": 1e-10,
    "carleman_slack": 1e-6,
    "quadform_floor_factor": 1e-8,
    "hardy_threshold_slack": 0.05,
}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_json_report(payload: dict, path: Path) -> None:
    payload = dict(payload)
    payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    payload["library_version"] = __version__
    payload["tolerances"] = _TOLERANCES
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False,
                   default=_json_default) + "\n",
        encoding="utf-8")


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fp:
        w = csv.writer(fp)
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])


# ----------------------------------------------------------------------------
# shared builders
# ----------------------------------------------------------------------------

def _build_window(args) -> LatticeWindow:
    return LatticeWindow(dim=args.dim, radius=(args.radius,) * args.dim)


def _build_data(args, window: LatticeWindow, rng: np.random.Generator) -> Field:
    kind = args.data
    if kind == "zero":
        return Field.zeros(window)
    if kind == "delta":
        return Field.delta(window)
    if kind == "gaussian":
        a = args.data_param
        return Field.from_profile(window, lambda *g: np.exp(-a * sum(x.astype(float) ** 2 for x in g)))
    if kind == "bessel":
        a = args.data_param
        table = log_bessel_i_all(a, max(window.radius))
        def profile(*g):
            out = np.zeros(g[0].shape, dtype=float)
            logs = sum(table[np.abs(x)] for x in g) - window.dim * table[0]
            np.exp(np.maximum(logs, -700.0), out=out)
            out[logs < -700.0] = 0.0
            return out
        return Field.from_profile(window, profile)
    if kind == "random":
        half = max(1, int(args.data_param)) if args.data_param else 2
        vals = np.zeros(window.shape, dtype=complex)
        box = tuple(slice(r - half, r + half + 1) for r in window.radius)
        shape = tuple(2 * half + 1 for _ in window.radius)
        vals[box] = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return Field(window, vals)
    raise ConfigError(f"unknown data kind {kind!r}")


def _build_weight(args):
    fam = args.weight
    if fam == "inverse_bessel_i":
        return InverseBesselWeight(lam=args.lam)
    if fam == "bessel_k":
        return BesselKWeight(lam=args.lam)
    if fam == "gaussian":
        return GaussianWeight(lam=args.lam)
    if fam == "linear":
        return LinearWeight(beta=tuple(args.beta))
    raise ConfigError(f"unknown weight family {fam!r}")


def _maybe_figures(args) -> bool:
    return not args.no_figures


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def cmd_evolve(args, out: Path, rng) -> int:
    window = _build_window(args)
    f0 = _build_data(args, window, rng)
    cfg = EvolutionConfig.for_time(args.t)
    u_spec = evolve_free_spectral(f0, args.t, cfg)
    delta = None
    if args.t >= 0 and f0.support_radius() + cfg.kernel_cut <= min(window.radius):
        u_conv = evolve_free_convolution(f0, args.t, cfg)
        denom = max(f0.norm(), 1e-300)
        delta = float(np.linalg.norm(u_spec.values - u_conv.values)) / denom
    with open(out / "initial.csv", "w", newline="", encoding="utf-8") as fp:
        field_to_csv(f0, fp)
    with open(out / "final.csv", "w", newline="", encoding="utf-8") as fp:
        field_to_csv(u_spec, fp)
    verdict = delta is None or delta <= _TOLERANCES["engine_cross_check"]
    payload = {
        "subcommand": "evolve",
        "config": {"dim": args.dim, "radius": args.radius, "data": args.data,
                   "data_param": args.data_param, "t": args.t, "seed": args.seed},
        "cross_check_delta": delta,
        "l2_initial": f0.norm(),
        "l2_final": u_spec.norm(),
        "unitarity_defect": abs(u_spec.norm() - f0.norm()) / max(f0.norm(), 1e-300),
        "verdict": verdict,
    }
    write_json_report(payload, out / "evolve_report.json")
    if delta is not None:
        print(f"engine cross-check delta = {delta:.3e}")
    print(f"unitarity defect = {payload['unitarity_defect']:.3e}")
    if _maybe_figures(args):
        from .figures import evolve_figure
        evolve_figure(window.dim, window.axes(), np.abs(f0.values), np.abs(u_spec.values),
                      args.t, out / "evolve.png")
    return EXIT_OK if verdict else EXIT_VERDICT


def cmd_convexity(args, out: Path, rng) -> int:
    window = _build_window(args)
    f0 = _build_data(args, window, rng)
    spec = _build_weight(args)
    t_grid = np.linspace(0.0, 1.0, args.grid_points)
    V = None
    if args.potential == "random":
        V = Potential.random_bounded(window, sup=args.v_sup, seed=args.seed + 1)
    cfg = EvolutionConfig.for_time(1.0, method="split_step", dt=args.dt)
    series = sample_series(f0, spec, t_grid, cfg, V=V, inner_radius=args.inner_radius)
    report = convexity_report(series, tol=args.tol)
    write_csv(out / "convexity_series.csv", ["t", "log_value", "tail_certificate"],
              zip(series.times, series.log_values, series.tail_certificates))
    payload = {
        "subcommand": "convexity",
        "config": {"dim": args.dim, "radius": args.radius, "data": args.data,
                   "data_param": args.data_param, "weight": weight_to_json_dict(spec),
                   "grid_points": args.grid_points, "potential": args.potential,
                   "v_sup": args.v_sup, "dt": args.dt, "seed": args.seed,
                   "inner_radius": series.inner_radius},
        "min_second_difference": report.min_second_difference,
        "max_interp_slack": report.max_interp_slack,
        "tol": report.tol,
        "scale": report.scale,
        "verdict": report.verdict,
    }
    write_json_report(payload, out / "convexity_report.json")
    print(f"min second difference = {report.min_second_difference:.3e}, "
          f"max slack = {report.max_interp_slack:.3e}, verdict = {report.verdict}")
    if _maybe_figures(args):
        from .figures import convexity_figure
        convexity_figure(series.times, series.log_values, report.verdict, out / "convexity_series.png")
    return EXIT_OK if report.verdict else EXIT_VERDICT


def cmd_scan(args, out: Path, rng) -> int:
    name = args.expression
    if name in ("eq1", "eq1_negated"):
        report, js, xs, vals = eq1_scan(threads=args.threads, negate=(name == "eq1_negated"))
    elif name == "lambda_j":
        report, js, xs, vals = lambda_scan(threads=args.threads)
    elif name in ("amos_I", "turan_K", "baricz_I_bounds", "segura_K_bounds"):
        report, js, xs, vals = turan_scan(name, threads=args.threads)
    else:
        raise ConfigError(f"unknown expression {name!r}")
    payload = {"subcommand": "scan", "config": {"expression": name, "seed": args.seed},
               **report.to_json_dict()}
    write_json_report(payload, out / f"scan_{name}.json")
    if args.csv_values:
        rows = ((int(js[a]), float(xs[b]), float(vals[a, b]))
                for a in range(js.size) for b in range(xs.size)
                if np.isfinite(vals[a, b]))
        write_csv(out / f"scan_{name}.csv", ["j", "x", "value"], rows)
    print(f"{name}: min = {report.min_value:.6e} at (j={report.argmin[0]}, x={report.argmin[1]:.6g}), "
          f"verdict = {report.verdict}")
    if _maybe_figures(args):
        from .figures import scan_figure
        scan_figure(js, xs, vals, name, report.argmin, out / f"scan_{name}.png")
    return EXIT_OK if report.verdict else EXIT_VERDICT


_SWEEP_PROFILES = (("narrow", 4, 0.0), ("wide", 10, 0.0), ("oscillatory", 6, 0.5))


def cmd_carleman(args, out: Path, rng) -> int:
    mus = [args.mu] if args.mu else [0.6, 1.0]
    epss = [args.eps] if args.eps else [0.05, 0.1]
    rs = [args.R] if args.R else [50.0, 100.0, 200.0]
    rows = []
    all_ok = True
    for mu in mus:
        for eps in epss:
            for r in rs:
                p = CarlemanParams(mu=mu, eps=eps, big_r=r)
                for profile, width, osc in _SWEEP_PROFILES:
                    window = LatticeWindow(dim=1, radius=(width + 2,))
                    g = bump_test_function(window, width, oscillation=osc,
                                           n_times=recommended_time_nodes(p, width))
                    rep = verify_carleman(g, p)
                    rows.append({**rep.to_json_dict(), "profile": profile})
                    all_ok &= rep.verdict
                qmins = []
                window = LatticeWindow(dim=1, radius=(int(r / 4 + 150),))
                for t in np.linspace(0.05, 0.95, 19):
                    q = eqc_quadratic_form(p, float(t), window)
                    qmins.append(q.min_rayleigh)
                    all_ok &= q.min_rayleigh >= -_TOLERANCES["quadform_floor_factor"] * q.target
                rows.append({"params": {"mu": mu, "eps": eps, "R": r},
                             "profile": "quadratic_form",
                             "ratio": 0.0,
                             "min_rayleigh": min(qmins),
                             "target": p.target,
                             "verdict": bool(min(qmins) >= -_TOLERANCES["quadform_floor_factor"] * p.target)})
    payload = {"subcommand": "carleman",
               "config": {"mu": mus, "eps": epss, "R": rs, "seed": args.seed},
               "mu0": mu0(),
               "rows": rows,
               "verdict": all_ok}
    write_json_report(payload, out / "carleman_report.json")
    write_csv(out / "carleman_sweep.csv",
              ["mu", "eps", "R", "profile", "lhs_log", "rhs_log", "ratio", "verdict"],
              [[r["params"]["mu"], r["params"]["eps"], r["params"]["R"], r["profile"],
                r.get("lhs_log", math.nan), r.get("rhs_log", math.nan), r["ratio"], str(r["verdict"])]
               for r in rows])
    print(f"carleman sweep: {len(rows)} rows, verdict = {all_ok}")
    if _maybe_figures(args):
        from .figures import carleman_figure
        carleman_figure([r for r in rows if r["profile"] != "quadratic_form"], out / "carleman_sweep.png")
    return EXIT_OK if all_ok else EXIT_VERDICT


def hardy_experiment(a: float, radius: int = 120, guard: float = 1e-280) -> dict:
    """Two-time envelope experiment for data u_j(0) = I_j(a)/I_0(a).

    alpha = a by construction; beta* is the smallest envelope order such that
    |u_j(1)| <= C I_j(beta) holds across the certified range with the maximum
    of the log-ratio attained away from the range's tail (C is the fitted
    maximum ratio).  The sharp two-time principle forbids alpha + beta* < 2
    for nonzero data.
    """
    window = LatticeWindow(dim=1, radius=(radius,))
    table = log_bessel_i_all(a, radius)
    logs0 = table[np.abs(window.axes()[0])] - table[0]
    vals = np.exp(np.maximum(logs0, -740.0))
    vals[logs0 < -740.0] = 0.0
    f0 = Field(window, vals.astype(complex))
    log_u1 = free_evolution_log_abs(f0, 1.0)
    js = window.axes()[0]
    pos = js >= 0
    jvals = js[pos]
    lu = log_u1[pos]
    certified = (lu > math.log(guard)) & (jvals <= radius - 5)
    jmax = int(jvals[certified].max())
    jr = np.arange(0, jmax + 1)
    lu = lu[: jmax + 1]

    def envelope_argmax(beta: float) -> int:
        tab = log_bessel_i_all(beta, jmax)
        r = lu - tab[jr]
        return int(np.argmax(r))

    def ok(beta: float) -> bool:
        return envelope_argmax(beta) <= 0.75 * jmax

    lo, hi = 0.02, 8.0
    if not ok(hi):
        raise ArithmeticError("envelope fit did not bracket; certified range too short")
    if ok(lo):
        hi = lo
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    beta_star = hi
    tab = log_bessel_i_all(beta_star, jmax)
    ratios = lu - tab[jr]
    c_fit = float(np.exp(ratios.max()))
    return {
        "a": a,
        "alpha": a,
        "beta_star": float(beta_star),
        "alpha_plus_beta": float(a + beta_star),
        "C": c_fit,
        "certified_jmax": jmax,
        "log_u1": [float(v) for v in lu],
        "log_envelope": [float(v + math.log(c_fit)) for v in tab[jr]],
    }


def cmd_hardy(args, out: Path, rng) -> int:
    if args.a <= 0:
        if args.a == 0:
            payload = {"subcommand": "hardy", "config": {"a": args.a}, "trivial_solution": True,
                       "verdict": True}
            write_json_report(payload, out / "hardy_report.json")
            print("zero data: trivial solution")
            return EXIT_OK
        raise ConfigError("hardy requires a >= 0")
    res = hardy_experiment(args.a, radius=args.radius)
    threshold = 2.0 - _TOLERANCES["hardy_threshold_slack"]
    verdict = res["alpha_plus_beta"] >= threshold
    payload = {"subcommand": "hardy",
               "config": {"a": args.a, "radius": args.radius, "seed": args.seed},
               "alpha": res["alpha"], "beta_star": res["beta_star"],
               "alpha_plus_beta": res["alpha_plus_beta"], "C": res["C"],
               "certified_jmax": res["certified_jmax"],
               "threshold": threshold, "verdict": verdict}
    write_json_report(payload, out / "hardy_report.json")
    write_csv(out / "hardy_envelope.csv", ["j", "log_u1", "log_envelope"],
              zip(range(res["certified_jmax"] + 1), res["log_u1"], res["log_envelope"]))
    print(f"a = {args.a}: alpha + beta* = {res['alpha_plus_beta']:.4f} "
          f"(threshold {threshold}), C = {res['C']:.3e}, verdict = {verdict}")
    if _maybe_figures(args):
        from .figures import hardy_figure
        hardy_figure(np.arange(res["certified_jmax"] + 1), res["log_u1"], res["beta_star"],
                     res["log_envelope"], args.a, out / "hardy_envelope.png")
    return EXIT_OK if verdict else EXIT_VERDICT


def cmd_specfun_selftest(args, out: Path, rng) -> int:
    report = self_test()
    ok = all(entry["ok"] for entry in report.values())
    payload = {"subcommand": "specfun-selftest", "config": {},
               "checks": report, "verdict": ok}
    write_json_report(payload, out / "specfun_selftest.json")
    for name, entry in sorted(report.items()):
        print(f"{name}: worst = {entry['worst']:.3e} (tol {entry['tol']:g}) "
              f"{'PASS' if entry['ok'] else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERDICT


# ----------------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="convexlab",
                                 description="discrete Schrodinger log-convexity verification lab")
    ap.add_argument("--config", type=str, default=None,
                    help="JSON file whose keys override individual flags")
    ap.add_argument("--out", type=str, default="out")
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--no-figures", action="store_true")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    ev = sub.add_parser("evolve", help="run the free engines and cross-check them")
    ev.add_argument("--dim", type=int, default=1)
    ev.add_argument("--radius", type=int, default=60)
    ev.add_argument("--data", default="delta",
                    choices=["delta", "gaussian", "bessel", "random", "zero"])
    ev.add_argument("--data-param", type=float, default=0.5)
    ev.add_argument("--t", type=float, default=1.0)

    cv = sub.add_parser("convexity", help="sample a weighted norm and certify log-convexity")
    cv.add_argument("--dim", type=int, default=1)
    cv.add_argument("--radius", type=int, default=26)
    cv.add_argument("--inner-radius", type=int, default=None)
    cv.add_argument("--data", default="delta",
                    choices=["delta", "gaussian", "bessel", "random", "zero"])
    cv.add_argument("--data-param", type=float, default=0.5)
    cv.add_argument("--weight", default="inverse_bessel_i",
                    choices=["inverse_bessel_i", "bessel_k", "gaussian", "linear"])
    cv.add_argument("--lam", type=float, default=0.1)
    cv.add_argument("--beta", type=float, nargs="+", default=[0.5])
    cv.add_argument("--grid-points", type=int, default=21)
    cv.add_argument("--potential", default="none", choices=["none", "random"])
    cv.add_argument("--v-sup", type=float, default=2.0)
    cv.add_argument("--dt", type=float, default=1e-3)
    cv.add_argument("--tol", type=float, default=1e-8)

    sc = sub.add_parser("scan", help="positivity scan of a scalar inequality family")
    sc.add_argument("--expression", default="eq1",
                    choices=["eq1", "lambda_j", "amos_I", "turan_K",
                             "baricz_I_bounds", "segura_K_bounds", "eq1_negated"])
    sc.add_argument("--csv-values", action="store_true",
                    help="also dump (j, x, value) rows for plotting")

    ca = sub.add_parser("carleman", help="verify the weighted space-time inequality")
    ca.add_argument("--mu", type=float, default=None)
    ca.add_argument("--eps", type=float, default=None)
    ca.add_argument("--R", type=float, default=None)

    hy = sub.add_parser("hardy", help="two-time envelope threshold experiment")
    hy.add_argument("--a", type=float, default=0.5)
    hy.add_argument("--radius", type=int, default=120)

    sub.add_parser("specfun-selftest", help="identity-based special-function self-tests")
    return ap


_COMMANDS = {
    "evolve": cmd_evolve,
    "convexity": cmd_convexity,
    "scan": cmd_scan,
    "carleman": cmd_carleman,
    "hardy": cmd_hardy,
    "specfun-selftest": cmd_specfun_selftest,
}


def _apply_config_overrides(args, parser) -> None:
    if not args.config:
        return
    overrides = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"config key {key!r} does not match any flag")
        setattr(args, attr, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_overrides(args, parser)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        rng = np.random.default_rng(args.seed)
        return _COMMANDS[args.subcommand](args, out, rng)
    except (ConfigError, ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TailCertificateError, QuadratureError, WindowGuardError, SupportOverflowError) as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE


if __name__ == "__main__":
    sys.exit(main())
