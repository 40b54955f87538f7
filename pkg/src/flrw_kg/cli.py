"""Batch front end: ``flrw-kg <subcommand> --config run.json [--out DIR] [--threads N] [--plot]``.

Exit codes: 0 success, 1 runtime error, 2 configuration error, 3 oracle mismatch.
Errors are printed to stderr as one JSON object.  FLRW_KG_LOG sets the log level.
"""

import argparse
import csv
import json
import logging
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import analysis, oracle, semilinear, transform
from .config import RunConfig
from .errors import ConfigError, FlrwKgError, Inapplicable
from .params import CurvedMass

log = logging.getLogger("flrw_kg")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_MISMATCH = 0, 1, 2, 3


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_clean(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


TRACE_HEADER = ["t", "l2", "hs", "weighted"]


def _plot(args, fn, *a):
    if args.plot:
        from . import plotting

        getattr(plotting, fn)(*a)


# ---------------------------------------------------------------- commands

def cmd_solve_linear(cfg, out, args):
    params = cfg.model()
    phi0, phi1 = cfg.initial_data()
    ts = cfg.t_grid()
    prob = transform.LinearProblem(params, phi0, phi1, ts, source=cfg.source())
    trace = transform.solve_linear(prob, cfg.quadrature(), threads=args.threads)
    write_csv(out / "trace.csv", TRACE_HEADER, trace.rows())
    _plot(args, "plot_trace", trace, out / "trace.png", "linear solution")
    status = EXIT_OK
    summary = {"x_norm": trace.x_norm, "times": len(trace)}
    if cfg.data["oracle"]["compare"] and prob.source is None:
        ref = oracle.mode_oracle_trace(params, phi0, phi1, ts, cfg.stepper())
        diff = np.linalg.norm((trace.coeffs - ref.coeffs).reshape(len(ts), -1), axis=1)
        scale = np.linalg.norm(ref.coeffs.reshape(len(ts), -1), axis=1)
        rel = np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), diff)
        ok = bool(np.all(rel <= cfg.data["oracle"]["rtol"]))
        write_json(out / "comparison.json", {"rtol": cfg.data["oracle"]["rtol"], "max_rel_l2": float(rel.max(initial=0.0)),
                                             "per_t": [[float(t), float(r)] for t, r in zip(ts, rel)], "pass": ok})
        summary["oracle_pass"] = ok
        status = EXIT_OK if ok else EXIT_MISMATCH
    write_json(out / "summary.json", summary)
    return status


def cmd_solve_semilinear(cfg, out, args):
    params = cfg.model()
    phi0, phi1 = cfg.initial_data()
    sl = cfg.data["semilinear"]
    ts = cfg.t_grid()
    if sl["method"] == "mol":
        T = max(float(sl["T"]), float(ts.max(initial=0.0)))
        res = oracle.mol_solve_semilinear(params, phi0, phi1, cfg.stepper(), T=T, t_out=np.union1d([0.0, T], ts))
        write_csv(out / "trace.csv", TRACE_HEADER, res.trace.rows())
        write_json(out / "report.json", {"method": "mol", "blowup": res.blowup, "t_blowup": res.t_blowup,
                                         "bracket": list(res.bracket), "reason": res.reason, "steps": res.steps,
                                         "x_norm": res.trace.x_norm})
        _plot(args, "plot_trace", res.trace, out / "trace.png", "method of lines")
        return EXIT_OK
    radius = sl["radius"]
    monitor = semilinear.XNormMonitor(params.gamma, params.s, float(radius) if radius is not None else math.inf)
    mesh = semilinear.TimeMesh(float(sl["T"]), float(sl["panel"]), int(sl["nodes"]))
    prob = transform.LinearProblem(params, phi0, phi1, ts)
    trace, rep = semilinear.picard_solve(prob, params.nonlinearity, monitor, int(sl["max_iter"]), float(sl["tol"]),
                                         mesh, cfg.quadrature())
    write_csv(out / "trace.csv", TRACE_HEADER, trace.rows())
    write_json(out / "report.json", {"method": "picard", "converged": rep.converged, "iterations": rep.iterations,
                                     "distances": rep.distances, "ratios": rep.ratios, "residual": rep.residual,
                                     "x_norm": rep.x_norm, "escape_time": rep.escape_time})
    _plot(args, "plot_trace", trace, out / "trace.png", "Picard fixed point")
    return EXIT_OK


def cmd_classify(cfg, out, args):
    try:
        verdict = analysis.classify(cfg.model()).as_dict()
    except Inapplicable as exc:
        verdict = {"case": "inapplicable", "applicable": False, "reason": str(exc)}
    write_json(out / "verdict.json", verdict)
    return EXIT_OK


def cmd_lifespan(cfg, out, args):
    params = cfg.model()
    ls = cfg.data["lifespan"]
    eps = [float(e) for e in ls["eps"]]
    if not eps:
        raise ConfigError("at least one eps is required", "lifespan.eps")
    points = None
    C = ls["C"]
    if ls["measure"]:
        phi0, phi1 = cfg.field("phi0"), cfg.field("phi1")
        level = ls["onset_level"]
        if level is None:
            level = _vacuum_level(params)
        points = oracle.lifespan_ladder(params, phi0, phi1, eps, cfg.stepper(), float(ls["T_cap"]), float(level))
        if C is None:
            ref = max(points, key=lambda p: p.eps)
            t_ref = ref.t_blowup if ref.blowup else ref.onset
            if not math.isfinite(t_ref):
                raise FlrwKgError("no lifespan measured at the calibration eps")
            C = analysis.calibrate_constant(params, ref.eps, t_ref)
    if C is None:
        C = 1.0
    bounds = [analysis.lifespan_lower_bound(params, e, C) for e in eps]
    rows = []
    for i, e in enumerate(eps):
        p = points[i] if points else None
        rows.append([e, bounds[i], p.t_blowup if p else math.nan, p.onset if p else math.nan,
                     p.t_reached if p else math.nan])
    write_csv(out / "lifespan.csv", ["eps", "bound", "measured_blowup", "onset", "t_reached"], rows)
    x = -np.log(eps)
    summary = {"C": C, "bound_slope": float(np.polyfit(x, bounds, 1)[0]) if len(eps) > 1 else None}
    if points and len(eps) > 1:
        onset = np.array([p.onset for p in points])
        if np.all(np.isfinite(onset)):
            summary["onset_slope"] = float(np.polyfit(x, onset, 1)[0])
        summary["blowups"] = sum(p.blowup for p in points)
    write_json(out / "lifespan.json", summary)
    _plot(args, "plot_lifespan", eps, bounds, [r[3] for r in rows] if points else None, out / "lifespan.png")
    return EXIT_OK


def _vacuum_level(params):
    spec = params.nonlinearity
    m_sq = complex(params.m_sq).real
    if spec.kind == "higgs_cubic" and spec.coeff > 0 and m_sq < 0:
        return math.sqrt(-m_sq / spec.coeff)
    return 1.0


def cmd_certify_kernels(cfg, out, args):
    c = cfg.data["certify"]
    t = np.linspace(c["t"]["start"], c["t"]["stop"], int(c["t"]["count"]))
    rows, summary = [], []
    for a in c["a"]:
        for m in c["M"]:
            M = complex(*m) if isinstance(m, list) else complex(m)
            mass = CurvedMass.from_M(1, M)
            for name, fn in (("K1", analysis.certify_K1_bound), ("K0", analysis.certify_K0_bound)):
                rep = fn(float(a), mass, t, int(c["nodes"]))
                rows += [[name, a, M.real, M.imag, *r] for r in rep.rows()]
                summary.append({"kernel": name, "a": a, "M": [M.real, M.imag], "sup_ratio": rep.sup_ratio,
                                "drift": rep.drift, "small_t_slope": rep.small_t_slope})
                _plot(args, "plot_bound_report", rep, out / f"{name}_a{a:g}_M{M.real:g}{M.imag:+g}i.png")
    write_csv(out / "certify.csv", ["kernel", "a", "M_re", "M_im", "t", "integral", "bound", "ratio"], rows)
    write_json(out / "certify.json", summary)
    return EXIT_OK


def cmd_domain(cfg, out, args):
    d = cfg.data["domain"]
    case = d["case"]
    boxes = (d["M"], d["gamma"], d["Gamma"])
    if d["panel"] is not None:
        if d["panel"] not in analysis.FIGURE_PANELS:
            raise ConfigError("panel must be one of a, b, c, d", "domain.panel")
        case, *boxes = analysis.FIGURE_PANELS[d["panel"]]
    cloud = analysis.feasible_domain_sample(int(d["n"]), float(d["alpha"]), *boxes, int(d["count"]), cfg.data["seed"])
    dup = analysis.classify_inequalities(cloud.n, cloud.alpha, cloud.M, cloud.gamma, cloud.Gamma)
    mismatches = int(np.sum(dup != cloud.cases))
    shown = cloud.select(case) if case else cloud
    write_csv(out / "domain.csv", ["M", "gamma", "Gamma", "case"], shown.rows())
    counts = {k: int(np.sum(cloud.cases == k)) for k in sorted(set(cloud.cases.tolist()))}
    write_json(out / "domain.json", {"samples": len(cloud), "selected": len(shown), "case": case,
                                     "counts": counts, "duplicate_mismatches": mismatches})
    _plot(args, "plot_domain", shown, out / "domain.png", f"case {case}" if case else "all cases")
    return EXIT_OK if mismatches == 0 else EXIT_MISMATCH


def cmd_oracle(cfg, out, args):
    params = cfg.model()
    phi0, phi1 = cfg.initial_data()
    ts = cfg.t_grid()
    if params.nonlinearity.coeff == 0 and cfg.source() is None:
        trace = oracle.mode_oracle_trace(params, phi0, phi1, ts, cfg.stepper())
        info = {"solver": "mode"}
    else:
        res = oracle.mol_solve_semilinear(params, phi0, phi1, cfg.stepper(), T=float(ts.max(initial=0.0)),
                                          t_out=ts)
        trace = res.trace
        info = {"solver": "mol", "blowup": res.blowup, "t_blowup": res.t_blowup}
    write_csv(out / "oracle_trace.csv", TRACE_HEADER, trace.rows())
    write_json(out / "oracle.json", info)
    _plot(args, "plot_trace", trace, out / "oracle_trace.png", "oracle")
    return EXIT_OK


COMMANDS = {
    "solve-linear": cmd_solve_linear,
    "solve-semilinear": cmd_solve_semilinear,
    "classify": cmd_classify,
    "lifespan": cmd_lifespan,
    "certify-kernels": cmd_certify_kernels,
    "domain": cmd_domain,
    "oracle": cmd_oracle,
}


def build_parser():
    p = argparse.ArgumentParser(prog="flrw-kg", description="Klein-Gordon solvers on the contracting FLRW background")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run configuration (defaults apply when omitted)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--threads", type=int, default=None, help="worker threads, 0 = all cores")
    p.add_argument("--plot", action="store_true", help="also render PNG figures next to the data files")
    p.add_argument("--dump-config", action="store_true", help="print the fully defaulted configuration and exit")
    return p


def _error(kind, message, location=None):
    payload = {"error": kind, "message": message}
    if location is not None:
        payload["location"] = location
    print(json.dumps(payload), file=sys.stderr)


def main(argv=None):
    logging.basicConfig(level=os.environ.get("FLRW_KG_LOG", "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig.from_dict({})
        if args.dump_config:
            sys.stdout.write(cfg.dump())
            return EXIT_OK
        if args.threads is None:
            args.threads = int(cfg.data["threads"])
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, args)
    except ConfigError as exc:
        _error("ConfigError", str(exc), exc.location)
        return EXIT_CONFIG
    except FlrwKgError as exc:
        _error(type(exc).__name__, str(exc))
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
