"""Scenario configs, the run pipeline, convergence studies and sweeps.

A scenario binds a profile, compactly supported data, solver settings,
a multiplier source and a fit window.  Configs are TOML files; a small
catalog ships with the package.  Outputs are a trace CSV plus a summary
JSON validated against the shipped schema; files are written atomically.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import json
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

try:
    import tomllib as tomli
except ImportError:  # Python < 3.11
    import tomli

from . import functionals as fn
from . import multipliers as mult
from . import profiles as prof
from . import rates
from .solver import DomainMode, EnergyTrace, InitialData, SolverConfig, run
from .trace import TRACE_COLUMNS, StandardProbe, write_trace_csv

__all__ = [
    "Scenario",
    "ScenarioError",
    "ScenarioResult",
    "load_scenario",
    "catalog_names",
    "load_catalog_scenario",
    "make_initial_data",
    "run_scenario",
    "convergence_study",
    "sweep",
    "SWEEPABLE",
]

DATA_SHAPES = ("bump", "hat", "box-velocity")
SWEEPABLE = ("V0", "L2", "dead_zone_end", "R", "dx")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INSTABILITY = 3
EXIT_CHECK_FAILED = 4


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    domain_mode: DomainMode
    profile: prof.DampingProfile
    validate_profile: bool
    data_shape: str
    data_amplitude: float
    support_radius: float
    dx: float
    cfl: float
    t_final: float
    wavefront_margin: int
    record_stride: int            # 0 means auto (~2000 samples)
    multiplier_source: str        # "paper-defaults" | "explicit"
    explicit_params: mult.MultiplierParams | None
    t0_max: float
    fit_window: tuple[float, float]
    bound_exponent: float

    def solver_config(self, dx: float | None = None) -> SolverConfig:
        dx = self.dx if dx is None else dx
        stride = self.record_stride
        if stride == 0:
            n_steps = max(1, int(round(self.t_final / (self.cfl * dx))))
            stride = max(1, n_steps // 2000)
        return SolverConfig(
            dx=dx,
            t_final=self.t_final,
            cfl=self.cfl,
            domain_mode=self.domain_mode,
            wavefront_margin=self.wavefront_margin,
            record_stride=stride,
        )


def make_initial_data(shape: str, amplitude: float, radius: float) -> InitialData:
    """Named data shapes, all supported in [0, radius] and boundary
    compatible on the half line."""
    r = radius
    a = amplitude
    if shape == "bump":
        # cos^2 window centered at r/2, i.e. a sin^2(pi x / r) arch on [0, r]
        def u0(x):
            return np.where((x >= 0.0) & (x <= r), a * np.sin(np.pi * x / r) ** 2, 0.0)
        def u1(x):
            return np.zeros_like(x)
    elif shape == "hat":
        def u0(x):
            return a * np.maximum(0.0, 1.0 - np.abs(x - r / 2.0) / (r / 2.0))
        def u1(x):
            return np.zeros_like(x)
    elif shape == "box-velocity":
        def u0(x):
            return np.zeros_like(x)
        def u1(x):
            return np.where((x >= 0.0) & (x <= r), a, 0.0)
    else:
        raise ScenarioError(f"unknown data shape {shape!r}")
    return InitialData(u0=u0, u1=u1, support_radius=r)


def _parse_profile(table: dict) -> prof.DampingProfile:
    try:
        kind = prof.ProfileKind(table["kind"])
    except (KeyError, ValueError) as exc:
        raise ScenarioError(f"bad profile kind: {exc}") from exc
    return prof.DampingProfile(
        kind=kind,
        amplitude=float(table.get("amplitude", 0.0)),
        l2=float(table.get("l2", 0.0)),
        dead_zone_end=float(table.get("dead_zone_end", 0.0)),
    )


def parse_scenario(raw: dict) -> Scenario:
    try:
        profile = _parse_profile(raw["profile"])
        data = raw["data"]
        solver = raw["solver"]
        fit = raw.get("fit", {})
        mtab = raw.get("multipliers", {})
        shape = data["shape"]
        if shape not in DATA_SHAPES:
            raise ScenarioError(f"unknown data shape {shape!r}")
        source = mtab.get("source", "paper-defaults")
        explicit = None
        if source == "explicit":
            explicit = mult.MultiplierParams(
                eps1=float(mtab["eps1"]),
                eps2=float(mtab["eps2"]),
                eps3=float(mtab["eps3"]),
                k=float(mtab["k"]),
            )
        elif source != "paper-defaults":
            raise ScenarioError(f"unknown multiplier source {source!r}")
        window = fit.get("window", [1.0, float(solver["t_final"])])
        mode = DomainMode(raw.get("domain_mode", "half-line"))
        default_exp = 1.0 if mode is DomainMode.WHOLE_LINE else 2.0
        return Scenario(
            name=str(raw["name"]),
            domain_mode=mode,
            profile=profile,
            validate_profile=bool(raw.get("checks", {}).get("validate_profile", True)),
            data_shape=shape,
            data_amplitude=float(data.get("amplitude", 1.0)),
            support_radius=float(data["support_radius"]),
            dx=float(solver["dx"]),
            cfl=float(solver.get("cfl", 0.9)),
            t_final=float(solver["t_final"]),
            wavefront_margin=int(solver.get("wavefront_margin", 4)),
            record_stride=int(solver.get("record_stride", 0)),
            multiplier_source=source,
            explicit_params=explicit,
            t0_max=float(mtab.get("t0_max", 1e4)),
            fit_window=(float(window[0]), float(window[1])),
            bound_exponent=float(fit.get("bound_exponent", default_exp)),
        )
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad scenario config: {exc}") from exc


def load_scenario(path: str | Path) -> Scenario:
    try:
        with open(path, "rb") as f:
            raw = tomli.load(f)
    except (OSError, tomli.TOMLDecodeError) as exc:
        raise ScenarioError(f"cannot parse {path}: {exc}") from exc
    return parse_scenario(raw)


def catalog_names() -> list[str]:
    pkg = resources.files("dampedwave").joinpath("scenarios")
    return sorted(p.name[:-5] for p in pkg.iterdir() if p.name.endswith(".toml"))


def load_catalog_scenario(name: str) -> Scenario:
    pkg = resources.files("dampedwave").joinpath("scenarios")
    entry = pkg.joinpath(f"{name}.toml")
    if not entry.is_file():
        raise ScenarioError(
            f"unknown catalog scenario {name!r}; available: {', '.join(catalog_names())}"
        )
    return parse_scenario(tomli.loads(entry.read_text()))


@dataclass
class ScenarioResult:
    scenario: Scenario
    trace: EnergyTrace
    summary: dict
    exit_code: int
    trace_path: Path | None = None
    summary_path: Path | None = None


def _build_multipliers(scenario: Scenario):
    """Resolve (params, phi spec, constants, feasibility) for a scenario.

    Paper defaults need the derived profile constants, hence a profile
    satisfying the tail bounds with v0 > 2.  Explicit parameters work for
    any profile; the saturation weight then uses the derived interval
    when available and the degenerate phi otherwise.
    """
    constants = None
    try:
        constants = prof.derive_constants(scenario.profile, sample_resolution=scenario.dx)
    except ValueError:
        pass

    if scenario.multiplier_source == "paper-defaults":
        if constants is None:
            raise ScenarioError(
                "paper-defaults multipliers need a profile with a valid critical tail"
            )
        params = mult.default_params(constants.v0, constants.v_star)
        spec = mult.PhiSpec.from_constants(constants)
    else:
        params = scenario.explicit_params
        spec = (
            mult.PhiSpec.from_constants(constants)
            if constants is not None
            else mult.PhiSpec(0.0, 0.0)
        )
    feas = mult.check_feasibility(params, constants) if constants is not None else None
    return params, spec, constants, feas


def run_scenario(
    scenario: Scenario, out_dir: str | Path | None = None, quiet: bool = True
) -> ScenarioResult:
    """Run one scenario with all probes attached and summarize.

    Returns the trace, a schema-conforming summary dict and the exit
    status (0 ok, 4 when a trajectory-wise check derived from the theory
    fails).  Config and stability errors raise instead.
    """
    if scenario.validate_profile:
        report = prof.validate_assumption_A(
            scenario.profile,
            sample_resolution=scenario.dx,
            x_max=max(4.0 * (1.0 + scenario.profile.l2), 20.0),
        )
        if not report.structural_ok:
            bad = [c.name for c in report.clauses if not c.passed]
            raise ScenarioError(f"profile fails structural hypotheses: {bad}")

    params, spec, constants, feas = _build_multipliers(scenario)
    data = make_initial_data(
        scenario.data_shape, scenario.data_amplitude, scenario.support_radius
    )
    config = scenario.solver_config()

    t0_result = None
    if feas is not None and feas.passed:
        t0_result = mult.find_t0(
            params, scenario.profile, spec, r=scenario.support_radius,
            t_max=scenario.t0_max,
        )
        if t0_result.found:
            params = params.with_t0(t0_result.t0)

    whole = scenario.domain_mode is DomainMode.WHOLE_LINE
    n = int(np.ceil((scenario.support_radius + scenario.t_final) / config.dx)) + config.wavefront_margin + 2
    x = np.arange(n) * config.dx
    rhs = fn.budget_rhs(
        np.asarray(data.u0(x), dtype=float),
        np.asarray(data.u1(x), dtype=float),
        x, scenario.profile, config.dx, whole_line=whole,
    )
    probe = StandardProbe(params=params, profile=scenario.profile, spec=spec, budget_rhs=rhs)
    trace = run(data, scenario.profile, config, [probe])

    summary, exit_code = summarize(scenario, trace, params, spec, feas, t0_result)
    result = ScenarioResult(scenario, trace, summary, exit_code)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.trace_path = out / f"{scenario.name}.trace.csv"
        result.summary_path = out / f"{scenario.name}.summary.json"
        write_trace_csv(result.trace_path, trace.columns, trace.rows)
        _atomic_write_json(result.summary_path, summary)
    if not quiet:
        print(json.dumps(summary, indent=2))
    return result


def summarize(scenario, trace, params, spec, feas, t0_result):
    t = trace.column("t")
    e = trace.column("E")
    whole = scenario.domain_mode is DomainMode.WHOLE_LINE

    # The last recorded sample sits at (n_steps - 1) * dt, slightly before
    # t_final, so clip the requested window to the actual trace span.
    window = (max(scenario.fit_window[0], float(t[0])),
              min(scenario.fit_window[1], float(t[-1])))

    fit = None
    fit_error = None
    try:
        fit = rates.fit_decay_rate(t, e, window)
    except ValueError as exc:
        fit_error = str(exc)

    bound = None
    if fit is not None:
        b = rates.bounded_weighted_energy(t, e, scenario.bound_exponent, window)
        bound = {"exponent": scenario.bound_exponent, "sup": b.sup, "ratio": b.ratio}

    hardy = trace.column("hardy_ratio")
    max_hardy = None if whole else float(np.max(hardy))
    hardy_ok = True if whole else max_hardy <= 1.0 + 10.0 * trace.dx

    budget_ok = True
    budget_min_margin = None
    if not whole:
        rep = fn.check_budget(
            t, trace.column("weighted_budget_lhs"),
            float(trace.column("weighted_budget_rhs")[0]),
        )
        budget_ok = rep.passed
        budget_min_margin = rep.min_margin

    t0 = t0_result.t0 if (t0_result is not None and t0_result.found) else None
    combo_max = None
    if t0 is not None and bool(np.any(t >= t0)):
        combo_max = float(np.max(trace.column("lyap_combo")[t >= t0]))

    checks_ok = hardy_ok and budget_ok
    if t0_result is not None and not t0_result.found:
        checks_ok = False

    summary = {
        "name": scenario.name,
        "domain_mode": scenario.domain_mode.value,
        "grid": {
            "dx": trace.dx,
            "dt": trace.dt,
            "cfl": scenario.cfl,
            "t_final": scenario.t_final,
            "samples": int(trace.rows.shape[0]),
        },
        "energy": {"initial": float(e[0]), "final": float(e[-1])},
        "rate_fit": fit.to_dict() if fit is not None else None,
        "rate_fit_error": fit_error,
        "weighted_bound": bound,
        "multipliers": {
            "source": scenario.multiplier_source,
            "eps1": params.eps1,
            "eps2": params.eps2,
            "eps3": params.eps3,
            "k": params.k,
            "t0": t0,
            "t0_min_margin": (
                t0_result.min_margin
                if (t0_result is not None and t0_result.found)
                else None
            ),
            "feasibility": (
                {
                    "margin_sum": feas.margin_sum,
                    "margin_damping": feas.margin_damping,
                    "margin_near": feas.margin_near,
                    "margin_mid": feas.margin_mid,
                    "margin_tail": feas.margin_tail,
                    "margin_unified": feas.margin_unified,
                    "passed": feas.passed,
                }
                if feas is not None
                else None
            ),
        },
        "checks": {
            "max_hardy_ratio": max_hardy,
            "hardy_passed": bool(hardy_ok),
            "budget_passed": bool(budget_ok),
            "budget_min_margin": budget_min_margin,
            "lyap_combo_max_after_t0": combo_max,
        },
        "status": "ok" if checks_ok else "check-failed",
    }
    validate_summary(summary)
    return summary, (EXIT_OK if checks_ok else EXIT_CHECK_FAILED)


_SCHEMA = None


def summary_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        text = resources.files("dampedwave").joinpath("summary.schema.json").read_text()
        _SCHEMA = json.loads(text)
    return _SCHEMA


def validate_summary(summary: dict) -> None:
    import jsonschema

    jsonschema.validate(summary, summary_schema())


def _atomic_write_json(path: Path, obj: dict) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(obj, indent=2) + "\n")
    os.replace(tmp, path)


@dataclass
class ConvergenceLevel:
    dx: float
    error: float | None          # vs finest level; None for the reference
    observed_order: float | None


def convergence_study(scenario: Scenario, levels: int = 4) -> list[ConvergenceLevel]:
    """Refinement study against the finest level at the end time.

    Runs the scenario at dx, dx/2, ..., dx/2^(levels-1); the finest run is
    the reference.  Errors are discrete L2 norms of the displacement
    difference on the coarse nodes; observed order is log2 of successive
    error ratios.
    """
    if levels < 3:
        raise ScenarioError("need at least 3 levels")
    data = make_initial_data(
        scenario.data_shape, scenario.data_amplitude, scenario.support_radius
    )
    finals = []
    dxs = [scenario.dx / 2**i for i in range(levels)]
    # every level must end at the same physical time: snap t_final to a
    # whole number of coarse steps so the nested grids stay in sync
    n0 = max(1, int(round(scenario.t_final / (scenario.cfl * scenario.dx))))
    t_end = n0 * scenario.cfl * scenario.dx
    for dx in dxs:
        config = replace(scenario, t_final=t_end).solver_config(dx=dx)
        trace = run(data, scenario.profile, config, [])
        finals.append(trace.final_state.u_curr)

    ref = finals[-1]
    errors = []
    for i, u in enumerate(finals[:-1]):
        stridef = 2 ** (levels - 1 - i)
        ref_on_coarse = ref[::stridef][: u.size]
        diff = u[: ref_on_coarse.size] - ref_on_coarse
        errors.append(float(np.sqrt(trapz_sq(diff, dxs[i]))))

    out = []
    for i, dx in enumerate(dxs):
        if i >= len(errors):
            out.append(ConvergenceLevel(dx, None, None))
        else:
            order = (
                float(np.log2(errors[i] / errors[i + 1]))
                if i + 1 < len(errors) and errors[i + 1] > 0
                else None
            )
            out.append(ConvergenceLevel(dx, errors[i], order))
    return out


def trapz_sq(y: np.ndarray, dx: float) -> float:
    return fn.trapezoid(y * y, dx)


def _apply_parameter(scenario: Scenario, parameter: str, value: float) -> Scenario:
    if parameter == "V0":
        return replace(scenario, profile=replace(scenario.profile, amplitude=value))
    if parameter == "L2":
        return replace(scenario, profile=replace(scenario.profile, l2=value))
    if parameter == "dead_zone_end":
        return replace(scenario, profile=replace(scenario.profile, dead_zone_end=value))
    if parameter == "R":
        return replace(scenario, support_radius=value)
    if parameter == "dx":
        return replace(scenario, dx=value)
    raise ScenarioError(f"parameter must be one of {SWEEPABLE}")


def _sweep_one(args):
    scenario, parameter, value, out_dir = args
    row = {"parameter": parameter, "value": value}
    try:
        variant = _apply_parameter(scenario, parameter, value)
        variant = replace(variant, name=f"{scenario.name}-{parameter}-{value:g}")
        result = run_scenario(variant, out_dir=out_dir)
        s = result.summary
        row["status"] = s["status"]
        row["alpha"] = (
            s["rate_fit"]["alpha"] if s["rate_fit"] is not None else float("nan")
        )
        row["hardy_passed"] = s["checks"]["hardy_passed"]
        row["budget_passed"] = s["checks"]["budget_passed"]
    except Exception as exc:  # per-value failures recorded, sweep continues
        row["status"] = f"error: {exc}"
        row["alpha"] = float("nan")
        row["hardy_passed"] = False
        row["budget_passed"] = False
    return row


def sweep(
    scenario: Scenario,
    parameter: str,
    values: list[float],
    out_dir: str | Path | None = None,
    threads: int = 1,
) -> list[dict]:
    """Run the base scenario once per parameter value; failures of single
    values are recorded without aborting the rest."""
    if parameter not in SWEEPABLE:
        raise ScenarioError(f"parameter must be one of {SWEEPABLE}")
    jobs = [(scenario, parameter, v, out_dir) for v in values]
    if threads > 1 and len(jobs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    if out_dir is not None:
        write_sweep_csv(Path(out_dir) / f"{scenario.name}.sweep.csv", rows)
    return rows


SWEEP_COLUMNS = ["parameter", "value", "alpha", "hardy_passed", "budget_passed", "status"]


def write_sweep_csv(path: str | Path, rows: list[dict]) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    tmp = Path(path).with_name(Path(path).name + ".tmp")
    tmp.write_text(buf.getvalue())
    os.replace(tmp, path)
