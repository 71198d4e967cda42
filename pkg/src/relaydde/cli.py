"""Command-line front end emitting CSV/JSON artifacts for all analyses.

Subcommands: orbit, simulate, classify, sweep, therapy, threelevel, verify.
Exit codes: 0 success, 2 validation error, 3 infeasible plan / failed verify.
Floats are serialized with 17 significant digits so doubles round-trip
exactly and output is byte-identical for identical flags.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from . import oracle
from .arcs import History
from .engine import PulseWindow, evolve
from .exceptions import PlanInfeasible, RelayDDEError
from .orbit import periodic_solution
from .params import (ModelParams, PulseSpec, RawParams, Regime,
                     nondimensionalize, regime)
from .pulse import response_closed_form, response_simulated, thresholds
from .sweep import case_sequence, cycle_length_map, monotonicity_report
from .therapy import TherapyInput, apply_plan, plan
from .threelevel import ThreeLevelParams, three_level_pulse, undershoot_threshold

PRESETS = {
    "p1": ModelParams(tau=1.0, beta_l=0.4, beta_u=0.8),
    "p2": ModelParams(tau=1.0, beta_l=1.4, beta_u=0.8),
}


def _fmt(x) -> object:
    if isinstance(x, float):
        return float(f"{x:.17g}")
    return x


def _dump_json(obj) -> str:
    def enc(o):
        if isinstance(o, (float, np.floating)):
            x = float(o)
            if math.isfinite(x):
                return _fmt(x)
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        if isinstance(o, dict):
            return {k: enc(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [enc(v) for v in o]
        if isinstance(o, (np.integer,)):
            return int(o)
        return o
    return json.dumps(enc(obj), indent=2, sort_keys=True)


def _write(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), help="parameter preset")
    p.add_argument("--tau", type=float, help="nondimensional delay")
    p.add_argument("--beta-l", type=float, help="low-branch level beta_L")
    p.add_argument("--beta-u", type=float, help="high-branch level beta_U")
    p.add_argument("--gamma", type=float, help="raw decay rate (raw-model entry)")
    p.add_argument("--b-l", type=float, help="raw low-branch production")
    p.add_argument("--b-u", type=float, help="raw high-branch production")
    p.add_argument("--theta", type=float, help="raw switching threshold")
    p.add_argument("--tau-raw", type=float, help="raw delay")


def _params_from(args) -> ModelParams:
    if args.preset:
        return PRESETS[args.preset]
    raw = (args.gamma, args.b_l, args.b_u, args.theta, args.tau_raw)
    if any(v is not None for v in raw):
        if any(v is None for v in raw):
            raise RelayDDEError("raw-model entry needs all of "
                                "--gamma --b-l --b-u --theta --tau-raw")
        return nondimensionalize(RawParams(*raw))
    if args.tau is None or args.beta_l is None or args.beta_u is None:
        raise RelayDDEError("need --preset, or --tau --beta-l --beta-u, "
                            "or the full raw-model flags")
    return ModelParams(tau=args.tau, beta_l=args.beta_l, beta_u=args.beta_u)


def _history_from(spec: str, params: ModelParams) -> History:
    if spec == "orbit":
        return periodic_solution(params).history_min_phase()
    if spec == "premax":
        return periodic_solution(params).history_pre_max()
    if spec.startswith("const:"):
        return History.constant(float(spec.split(":", 1)[1]), params.tau)
    raise RelayDDEError(f"unknown history spec {spec!r} "
                        "(use const:<value>, orbit, or premax)")


def _cmd_orbit(args) -> int:
    orb = periodic_solution(_params_from(args))
    _write(_dump_json(orb.summary()), args.out)
    return 0


def _cmd_simulate(args) -> int:
    params = _params_from(args)
    hist = _history_from(args.history, params)
    pulse = None
    if args.amp is not None:
        if args.delta is None or args.sigma is None:
            raise RelayDDEError("pulse needs --amp --delta --sigma")
        pulse = PulseWindow(args.amp, args.delta, args.delta + args.sigma)
    traj = evolve(params, hist, args.horizon, pulse=pulse)
    if args.format == "json":
        # exact arc-chain export; plain repr floats round-trip exactly
        _write(traj.arcs_json(), args.out)
    else:
        lines = ["t,x"] + [f"{t:.17g},{x:.17g}" for t, x in traj.csv_rows(args.samples)]
        _write("\n".join(lines), args.out)
    zeros = {"zeros": [{"t": z.t, "up": z.up} for z in traj.zeros]}
    _write(_dump_json(zeros), args.zeros_out)
    return 0


def _cmd_classify(args) -> int:
    params = _params_from(args)
    pulse = PulseSpec(args.amp, args.delta, args.sigma, relaxed=args.relaxed)
    th = thresholds(params, args.amp, args.sigma)
    stats = response_simulated(params, pulse) if args.relaxed \
        else response_closed_form(params, pulse)
    payload = stats.to_dict(args.delta)
    payload["thresholds"] = {"delta1": th.delta1, "delta1_hat": th.delta1_hat,
                             "delta2": th.delta2, "delta_bar": th.delta_bar}
    _write(_dump_json(payload), args.out)
    return 0


def _cmd_sweep(args) -> int:
    params = _params_from(args)
    table = cycle_length_map(params, args.amp, args.sigma, args.grid)
    if args.format == "json":
        rows = [{"delta": r.delta, "case": r.case, "T": r.T,
                 "xmin": r.x_min, "xmax": r.x_max} for r in table.rows]
        _write(_dump_json(rows), args.out)
    else:
        _write("\n".join(table.csv_lines()), args.out)
    seq = case_sequence(params, args.amp, args.sigma)
    report = monotonicity_report(table)
    payload = {
        "cases": [{"case": iv.code.value, "interval": iv.label()} for iv in seq],
        "sequence": [iv.code.value for iv in seq],
        "markers": table.markers,
        "monotonicity": report.to_dict(),
    }
    _write(_dump_json(payload), args.report_out)
    return 0


def _cmd_therapy(args) -> int:
    params = _params_from(args)
    hist = _history_from(args.history, params)
    inp = TherapyInput(params=params, sigma=args.sigma, x_d=args.x_d, history=hist)
    therapy = plan(inp)
    payload = therapy.to_dict()
    code = 0
    if therapy.feasible:
        outcome = apply_plan(inp, therapy)
        payload["achieved_min"] = outcome.achieved_min
        payload["achieved_period"] = outcome.achieved_period
        if args.trajectory_out:
            lines = ["t,x"] + [f"{t:.17g},{x:.17g}"
                               for t, x in outcome.trajectory.csv_rows(args.samples)]
            _write("\n".join(lines), args.trajectory_out)
    else:
        payload["achieved_min"] = None
        payload["achieved_period"] = None
        code = 3
    _write(_dump_json(payload), args.out)
    return code


def _cmd_threelevel(args) -> int:
    params = _params_from(args)
    p3 = ThreeLevelParams(base=params, beta_star=args.beta_star)
    payload = three_level_pulse(p3, args.amp).to_dict()
    if args.find_tau0:
        payload["tau0"] = undershoot_threshold(p3, args.amp)
    _write(_dump_json(payload), args.out)
    return 0


def _cmd_verify(args) -> int:
    runs = []
    if args.preset or args.tau is not None or args.gamma is not None:
        runs.append(("given", _params_from(args)))
    else:
        runs = [("p1", PRESETS["p1"]), ("p2", PRESETS["p2"])]
    report = {"runs": [], "passed": True}
    for name, params in runs:
        if regime(params) is Regime.OSCILLATORY:
            horizon = 3 * periodic_solution(params).period
        else:
            horizon = 20 * params.tau
        hist = _history_from(args.history, params)
        dense = oracle.integrate_dense(params, hist, horizon, h=args.oracle_step)
        traj = evolve(params, hist, float(dense.t[-1]))
        rep = oracle.compare(traj, dense)
        ok = rep.max_abs_dev <= args.tolerance and rep.max_zero_dev <= 1e-6 \
            and rep.zero_counts_match
        report["runs"].append({"name": name, "max_abs_dev": rep.max_abs_dev,
                               "max_zero_dev": rep.max_zero_dev,
                               "zeros_exact": rep.zero_count_exact,
                               "zeros_dense": rep.zero_count_dense,
                               "ok": ok})
        report["passed"] = report["passed"] and ok
    _write(_dump_json(report), args.out)
    return 0 if report["passed"] else 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relaydde", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="closed-form periodic orbit summary")
    _add_model_flags(p)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(fn=_cmd_orbit)

    p = sub.add_parser("simulate", help="event-driven trajectory CSV + zeros JSON")
    _add_model_flags(p)
    p.add_argument("--history", default="const:1.0",
                   help="const:<v>, orbit, or premax (default const:1.0)")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--amp", type=float, help="pulse amplitude (optional)")
    p.add_argument("--delta", type=float, help="pulse onset")
    p.add_argument("--sigma", type=float, help="pulse duration")
    p.add_argument("--samples", type=int, default=1001, help="CSV sample count")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="csv samples or exact arc-chain json")
    p.add_argument("--out", help="trajectory path (default stdout)")
    p.add_argument("--zeros-out", help="zeros JSON path (default stdout)")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("classify", help="case code and cycle stats for one pulse")
    _add_model_flags(p)
    p.add_argument("--amp", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--relaxed", action="store_true",
                   help="allow a >= beta_U; stats via simulation")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("sweep", help="cycle-length map CSV + case/monotonicity JSON")
    _add_model_flags(p)
    p.add_argument("--amp", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="row output format")
    p.add_argument("--out", help="rows path (default stdout)")
    p.add_argument("--report-out", help="JSON report path (default stdout)")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("therapy", help="plan a pulse lifting the nadir to x_d")
    _add_model_flags(p)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--x-d", type=float, required=True, help="critical level (negative)")
    p.add_argument("--history", default="premax",
                   help="const:<v>, orbit, or premax (default premax)")
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--out", help="plan JSON path (default stdout)")
    p.add_argument("--trajectory-out", help="treated trajectory CSV path")
    p.set_defaults(fn=_cmd_therapy)

    p = sub.add_parser("threelevel", help="deep-suppression pulse checkpoints")
    _add_model_flags(p)
    p.add_argument("--beta-star", type=float, required=True)
    p.add_argument("--amp", type=float, required=True)
    p.add_argument("--find-tau0", action="store_true",
                   help="also bisect the smallest undershooting tau")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(fn=_cmd_threelevel)

    p = sub.add_parser("verify", help="exact engine vs dense oracle comparison")
    _add_model_flags(p)
    p.add_argument("--history", default="const:1.0")
    p.add_argument("--oracle-step", type=float, default=1e-4)
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.add_argument("--out", help="report JSON path (default stdout)")
    p.set_defaults(fn=_cmd_verify)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except PlanInfeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except RelayDDEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
