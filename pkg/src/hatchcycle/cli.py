"""Command-line interface.

Subcommands: simulate, equilibria, hopf, slowfast, sweep.  Each reads a
JSON config and writes CSV/JSON reports plus SVG renderings into the
output directory.  Exit codes: 0 success, 1 unknown subcommand, 2 config
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from .config import ConfigError, RunConfig, load_config, parse_model
from .equilibria import (calibrate_c, find_steady_states, lift_equilibrium_4d,
                         thresholds, uniqueness_sufficient)
from .hopf import bifurcation_point
from .model import check_assumptions, make_rhs
from .params import ReducedParams, StageParams, ThreeStageParams, reduce_stage_params
from .sim import IntegrationError, integrate, measure_oscillation
from .slowfast import build_cycle
from .sweep import SweepSpec, run_sweep
from . import plots

USAGE = """\
usage: hatchcycle <subcommand> --config CONFIG.json [--out-dir DIR] [--workers N]

subcommands:
  simulate    integrate a model and report trajectory + oscillation metrics
  equilibria  steady states, stability classes and structural checks
  hopf        oscillation-onset curve b_crit(a), frequency and criticality
  slowfast    singular relaxation cycle: skeleton, amplitudes and period
  sweep       run a parameter grid and emit period/amplitude surfaces
"""

_NUMERIC_ERRORS = (IntegrationError, ArithmeticError, ValueError,
                   ZeroDivisionError, OverflowError)


def _parse_args(cmd: str, argv: list[str]) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog=f"hatchcycle {cmd}")
    parser.add_argument("--config", required=True, help="path to the JSON config")
    parser.add_argument("--out-dir", default=None,
                        help="output directory (overrides the config)")
    if cmd == "sweep":
        parser.add_argument("--workers", type=int, default=None,
                            help="worker processes (default: HATCHCYCLE_WORKERS or CPU count)")
    return parser.parse_args(argv)


def _out_dir(cfg: RunConfig, override: str | None) -> Path:
    out = Path(override) if override else cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def _planar(params) -> ReducedParams:
    if isinstance(params, ReducedParams):
        return params
    return reduce_stage_params(params)


def _model_with_placeholder_c(cfg: RunConfig):
    """Model params for commands that recalibrate c themselves."""
    doc = cfg.doc.get("model")
    if not isinstance(doc, dict):
        raise ConfigError("config is missing required field 'model'")
    if "c" not in doc:
        doc = {**doc, "c": 1.0}
    return parse_model(doc)


def _default_initial(params, hatch, L_bar: float) -> tuple:
    p2 = _planar(params)
    E_bar = p2.b_E * L_bar / (p2.d_E + hatch.value(L_bar))
    if isinstance(params, ReducedParams):
        return (E_bar, L_bar + 0.02)
    if isinstance(params, ThreeStageParams):
        return (E_bar, L_bar + 0.02, params.tau_LA * L_bar / params.delta_A)
    E, L, P, A = lift_equilibrium_4d(params, hatch, L_bar)
    return (E, L + 0.02, P, A)


def _cmd_simulate(cfg: RunConfig, out: Path) -> None:
    hatch = cfg.hatch()
    L_bar = cfg.L_bar(required=False)
    params = cfg.model(hatch, L_bar)
    sim = cfg.sim()
    t_span = sim.t_span if sim.t_span is not None else (0.0, 150.0)

    if "initial" in cfg.doc:
        initial = tuple(float(v) for v in cfg.doc["initial"])
    elif L_bar is not None:
        initial = _default_initial(params, hatch, L_bar)
    else:
        raise ConfigError("simulate needs 'initial' or 'L_bar' in the config")

    horizon = t_span[1] - t_span[0]
    traj = integrate(make_rhs(params, hatch), initial, t_span,
                     rtol=sim.rtol, atol=sim.atol, max_dt_output=horizon / 4096.0)
    traj.write_csv(out / "trajectory.csv")
    plots.plot_trajectory(traj, out / "trajectory.svg")

    summary = {
        "accepted_steps": traj.accepted_steps,
        "rejected_steps": traj.rejected_steps,
        "t_span": list(traj.t_span),
    }
    if L_bar is not None:
        metrics = measure_oscillation(traj, 1, L_bar,
                                      transient_fraction=sim.transient_fraction)
        summary["oscillation"] = {
            k: (None if isinstance(v, float) and math.isnan(v) else v)
            for k, v in asdict(metrics).items()
        }
    (out / "metrics.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"wrote {out / 'trajectory.csv'}, {out / 'trajectory.svg'}, "
          f"{out / 'metrics.json'}")


def _cmd_equilibria(cfg: RunConfig, out: Path) -> None:
    hatch = cfg.hatch()
    L_bar = cfg.L_bar(required=False)
    params = _planar(cfg.model(hatch, L_bar))

    states = find_steady_states(params, hatch)
    with open(out / "equilibria.csv", "w", newline="") as fh:
        fh.write("L_bar,E_bar,trace,det,re_lambda,im_lambda,class\n")
        for eq in states:
            lam = eq.eigenvalues[0]
            fh.write(
                f"{eq.L_bar:.10g},{eq.E_bar:.10g},{eq.trace:.10g},{eq.det:.10g},"
                f"{lam.real:.10g},{lam.imag:.10g},{eq.classification}\n"
            )

    report = check_assumptions(params, hatch)
    doc = {k: (None if isinstance(v, float) and math.isinf(v) else v)
           for k, v in asdict(report).items()}
    try:
        unique, reason = uniqueness_sufficient(params, hatch)
        doc["uniqueness_sufficient"] = unique
        doc["uniqueness_reason"] = reason
    except ValueError as exc:
        doc["uniqueness_sufficient"] = None
        doc["uniqueness_reason"] = str(exc)
    if params.b_E > params.d_E + params.d_L and L_bar is not None:
        th = thresholds(params, L_bar)
        doc["k_plus"] = th.k_plus
        doc["a_crit"] = th.a_crit
    (out / "assumptions.json").write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out / 'equilibria.csv'}, {out / 'assumptions.json'}")


def _cmd_hopf(cfg: RunConfig, out: Path) -> None:
    L_bar = cfg.L_bar()
    params = _planar(_model_with_placeholder_c(cfg))
    a_list = cfg.doc.get("a_list")
    if not a_list:
        raise ConfigError("hopf needs a nonempty 'a_list'")
    points = [bifurcation_point(float(a), params, L_bar) for a in a_list]
    with open(out / "hopf.csv", "w", newline="") as fh:
        fh.write("a,b_crit,omega,period_T0,alpha_N,criticality\n")
        for pt in points:
            fh.write(f"{pt.a:.10g},{pt.b_crit:.10g},{pt.omega:.10g},"
                     f"{pt.period_T0:.10g},{pt.alpha_N:.10g},{pt.criticality}\n")
    plots.plot_hopf(points, out / "hopf.svg")
    print(f"wrote {out / 'hopf.csv'}, {out / 'hopf.svg'}")


def _cmd_slowfast(cfg: RunConfig, out: Path) -> None:
    hatch = cfg.hatch()
    L_bar = cfg.L_bar()
    d_E = float(cfg.doc.get("d_E", 0.0))
    cycle = build_cycle(hatch, L_bar, d_E)

    n = 256
    with open(out / "cycle_skeleton.csv", "w", newline="") as fh:
        fh.write("segment,u,v\n")
        for i in range(n):
            u = cycle.u_m0 + (cycle.u_M - cycle.u_m0) * i / (n - 1)
            fh.write(f"left_branch,{u:.10g},{cycle.phi(u):.10g}\n")
        fh.write(f"jump_top,{cycle.u_M:.10g},{cycle.phi_M:.10g}\n")
        fh.write(f"jump_top,{cycle.u_M0:.10g},{cycle.phi_M:.10g}\n")
        for i in range(n):
            u = cycle.u_M0 - (cycle.u_M0 - cycle.u_m) * i / (n - 1)
            fh.write(f"right_branch,{u:.10g},{cycle.phi(u):.10g}\n")
        fh.write(f"jump_bottom,{cycle.u_m:.10g},{cycle.phi_m:.10g}\n")
        fh.write(f"jump_bottom,{cycle.u_m0:.10g},{cycle.phi_m:.10g}\n")

    scalars = {
        "u_m0": cycle.u_m0, "u_M": cycle.u_M, "u_m": cycle.u_m, "u_M0": cycle.u_M0,
        "phi_m": cycle.phi_m, "phi_M": cycle.phi_M,
        "A_u": cycle.amplitude_u, "A_v": cycle.amplitude_v, "tau": cycle.tau,
        "eta0": cycle.eta0, "xi": cycle.xi,
    }
    (out / "cycle.json").write_text(json.dumps(scalars, indent=2) + "\n")
    plots.plot_cycle(cycle, out / "cycle.svg")
    print(f"wrote {out / 'cycle_skeleton.csv'}, {out / 'cycle.json'}, "
          f"{out / 'cycle.svg'}")


def _cmd_sweep(cfg: RunConfig, out: Path, workers: int | None) -> None:
    grid = cfg.grid()
    L_bar = cfg.L_bar()
    params = _model_with_placeholder_c(cfg)

    result = run_sweep(SweepSpec(grid=grid, params=params, L_bar=L_bar,
                                 sim=cfg.sim()), workers=workers)
    result.to_csv(out / "sweep.csv")
    plots.plot_sweep(result, out / "period.svg", out / "amplitude.svg")
    written = [out / "sweep.csv", out / "period.svg", out / "amplitude.svg"]

    failures = [
        {"coords": dict(rec.coords), "reason": rec.failure}
        for rec in result.records if rec.failure is not None
    ]
    if failures:
        (out / "failures.json").write_text(json.dumps(failures, indent=2) + "\n")
        written.append(out / "failures.json")
    print("wrote " + ", ".join(str(w) for w in written))


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(USAGE, end="")
        return 0 if argv else 1

    handlers = {
        "simulate": _cmd_simulate,
        "equilibria": _cmd_equilibria,
        "hopf": _cmd_hopf,
        "slowfast": _cmd_slowfast,
        "sweep": _cmd_sweep,
    }
    cmd = argv[0]
    if cmd not in handlers:
        print(f"error: unknown subcommand {cmd!r}", file=sys.stderr)
        print(USAGE, end="", file=sys.stderr)
        return 1

    try:
        args = _parse_args(cmd, argv[1:])
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return 0 if code == 0 else 2

    try:
        cfg = load_config(args.config)
        out = _out_dir(cfg, args.out_dir)
        if cmd == "sweep":
            _cmd_sweep(cfg, out, args.workers)
        else:
            handlers[cmd](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
