"""Command-line front end.

Subcommands: run, sweep, converge, check-multipliers, fit,
validate-profile.  Exit codes: 0 success, 2 config error, 3 numerical
instability, 4 a trajectory-wise check derived from the theory failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import multipliers as mult
from . import profiles as prof
from . import rates
from . import scenarios as sc
from .solver import InstabilityError
from .trace import read_trace_csv


def _load(args) -> sc.Scenario:
    if args.config:
        return sc.load_scenario(args.config)
    if args.scenario:
        return sc.load_catalog_scenario(args.scenario)
    raise sc.ScenarioError("need --config PATH or --scenario NAME")


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario config file (TOML)")
    p.add_argument("--scenario", help="name of a shipped catalog scenario")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--quiet", action="store_true")


def cmd_run(args) -> int:
    scenario = _load(args)
    result = sc.run_scenario(scenario, out_dir=args.out, quiet=args.quiet)
    if not args.quiet:
        print(f"trace:   {result.trace_path}")
        print(f"summary: {result.summary_path}")
    return result.exit_code


def cmd_sweep(args) -> int:
    scenario = _load(args)
    values = [float(v) for v in args.values.split(",")] if args.values else []
    rows = sc.sweep(scenario, args.parameter, values, out_dir=args.out, threads=args.threads)
    if not args.quiet:
        for row in rows:
            print(f"{args.parameter}={row['value']:g}  alpha={row['alpha']:.4g}  {row['status']}")
    return 0


def cmd_converge(args) -> int:
    scenario = _load(args)
    table = sc.convergence_study(scenario, levels=args.levels)
    if not args.quiet:
        print(f"{'dx':>12} {'error':>14} {'order':>8}")
        for lvl in table:
            err = f"{lvl.error:.6e}" if lvl.error is not None else "reference"
            order = f"{lvl.observed_order:.3f}" if lvl.observed_order is not None else "-"
            print(f"{lvl.dx:>12.6g} {err:>14} {order:>8}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        payload = [
            {"dx": l.dx, "error": l.error, "observed_order": l.observed_order}
            for l in table
        ]
        (out / f"{scenario.name}.convergence.json").write_text(
            json.dumps(payload, indent=2) + "\n"
        )
    return 0


def cmd_check_multipliers(args) -> int:
    scenario = _load(args)
    constants = prof.derive_constants(scenario.profile, sample_resolution=scenario.dx)
    if scenario.multiplier_source == "paper-defaults":
        params = mult.default_params(constants.v0, constants.v_star)
    else:
        params = scenario.explicit_params
    spec = mult.PhiSpec.from_constants(constants)
    feas = mult.check_feasibility(params, constants)
    result = mult.find_t0(
        params, scenario.profile, spec,
        r=scenario.support_radius, t_max=scenario.t0_max,
    )
    if not args.quiet:
        print(f"params: eps1={params.eps1:g} eps2={params.eps2:g} "
              f"eps3={params.eps3:g} k={params.k:g}")
        print(f"constants: v0={constants.v0:g} v1={constants.v1:g} "
              f"l1={constants.l1:g} l2={constants.l2:g} "
              f"v_m={constants.v_m:g} v_M={constants.v_big:g} v*={constants.v_star:g}")
        for label, margin in [
            ("sum      (eps3 - 2eps1 - 2eps2)", feas.margin_sum),
            ("damping  (2eps1 v0 - 2eps1 - 2eps2)", feas.margin_damping),
            ("near     ", feas.margin_near),
            ("mid      ", feas.margin_mid),
            ("tail     ", feas.margin_tail),
            ("unified  (2eps2 - 2eps1 - eps3 v*/k)", feas.margin_unified),
        ]:
            print(f"  {label:<40} margin = {margin:+.6g}")
        print(f"feasible: {feas.passed}")
        if result.found:
            print(f"t0 = {result.t0:g} (min margin {result.min_margin:.6g} "
                  f"up to t = {result.t_max:g})")
        else:
            print(f"t0 not found below t = {result.t_max:g}")
    if args.dump_grid:
        _dump_condition_grid(args.dump_grid, scenario, params, spec)
    return 0 if (feas.passed and result.found) else sc.EXIT_CHECK_FAILED


def _dump_condition_grid(path: str, scenario, params, spec) -> None:
    t_vals = np.geomspace(1.0, scenario.t0_max, 60)
    x_max = scenario.support_radius + float(t_vals[-1])
    x_vals = np.concatenate([
        np.linspace(0.0, max(spec.l2, scenario.support_radius) + 2.0, 60),
        np.geomspace(max(spec.l2, scenario.support_radius) + 2.0, x_max, 40),
    ])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "x", "cond_iii", "cond_iv"])
    for t in t_vals:
        m3 = mult.condition_iii(t, x_vals, params, scenario.profile, spec)
        m4 = mult.condition_iv(t, x_vals, params, scenario.profile, spec)
        for x, a, b in zip(x_vals, m3, m4):
            writer.writerow([f"{t:.8g}", f"{x:.8g}", f"{a:.8g}", f"{b:.8g}"])
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_name(p.name + ".tmp")
    tmp.write_text(buf.getvalue())
    os.replace(tmp, p)


def cmd_fit(args) -> int:
    _, rows = read_trace_csv(args.trace)
    t, e = rows[:, 0], rows[:, 1]
    window = (args.window_lo if args.window_lo is not None else float(t[0]),
              args.window_hi if args.window_hi is not None else float(t[-1]))
    fit = rates.fit_decay_rate(t, e, window)
    print(json.dumps(fit.to_dict(), indent=2))
    return 0


def cmd_validate_profile(args) -> int:
    scenario = _load(args)
    report = prof.validate_assumption_A(
        scenario.profile, sample_resolution=args.resolution, x_max=args.x_max
    )
    for clause in report.clauses:
        mark = "pass" if clause.passed else "FAIL"
        extra = ""
        if clause.worst_x is not None:
            extra = f"  (worst at x = {clause.worst_x:g}, margin {clause.worst_margin:+.3g})"
        print(f"  [{mark}] {clause.name}{extra}")
    print(f"structural: {'pass' if report.structural_ok else 'FAIL'}")
    return 0 if report.structural_ok else sc.EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dampedwave",
        description="Numerical laboratory for the damped wave equation "
        "with a critically decaying localized damping coefficient.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario with all probes")
    _add_scenario_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a scenario across parameter values")
    _add_scenario_args(p)
    p.add_argument("--parameter", required=True, choices=sc.SWEEPABLE)
    p.add_argument("--values", default="", help="comma-separated values")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("converge", help="grid refinement study")
    _add_scenario_args(p)
    p.add_argument("--levels", type=int, default=4)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("check-multipliers", help="feasibility table and t0")
    _add_scenario_args(p)
    p.add_argument("--dump-grid", help="CSV path for condition values on a (t,x) grid")
    p.set_defaults(func=cmd_check_multipliers)

    p = sub.add_parser("fit", help="fit a decay exponent to a trace CSV")
    p.add_argument("trace", help="trace CSV path")
    p.add_argument("--window-lo", type=float)
    p.add_argument("--window-hi", type=float)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate-profile", help="sample-check the damping hypotheses")
    _add_scenario_args(p)
    p.add_argument("--resolution", type=float, default=0.01)
    p.add_argument("--x-max", type=float, default=50.0)
    p.set_defaults(func=cmd_validate_profile)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except sc.ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return sc.EXIT_CONFIG
    except InstabilityError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return sc.EXIT_INSTABILITY
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
