"""Experiment orchestration: one function per experiment kind.

Everything is computed before any file is written, so a failed run leaves no
partial outputs behind.
"""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from . import reporting
from .config import ExperimentConfig
from .ergodicity import NU_STAR, certify_drift, moment_bound
from .moments import (ConstantVariance, MomentState, TabulatedVariance, ZeroVariance,
                      integrate_closed_loop, integrate_open)
from .network import NetworkParams
from .ssa import EnsembleTrace, run_closed_loop, stationary_sweep
from .stability import (demo_linear_fallacy, solve_equilibrium, uniform_gain_bound,
                        variance_bound)

log = logging.getLogger(__name__)


def tail_average(trace: EnsembleTrace, column: str, fraction: float = 1.0 / 3.0) -> float:
    return float(np.mean(trace.columns()[column][trace.tail(fraction)]))


def stability_report(params: NetworkParams, mu: float, kc: float, v_star: float | None = None,
                     v_star_source: dict | None = None) -> dict:
    """Gain and variance bounds, and the equilibrium analysis at ``v_star`` if known."""
    v_star = None if v_star is None else float(v_star)
    lo, hi = variance_bound(params, mu)
    kc_max = uniform_gain_bound(params)
    report = {
        "network": {"b": params.b, "gamma1": params.gamma1, "gamma2": params.gamma2},
        "mu": mu,
        "kc": kc,
        "uniform_gain_bound": kc_max,
        "kc_admissible": 0 < kc < kc_max,
        "variance_bound": {"lower_open": lo, "upper_closed": hi},
        "case_threshold": 2.0 * params.gamma2 * mu / params.b,
    }
    fallacy = demo_linear_fallacy(params, kc, mu, v_star)
    report["linear_fallacy"] = {
        "simplified_determinant": fallacy.simplified_determinant,
        "simplified_verdict": fallacy.simplified_verdict,
        "upper_block_hurwitz": fallacy.upper_block_hurwitz,
        "true_verdict": fallacy.true_verdict,
        "summary": fallacy.lines(),
    }
    if v_star is not None:
        eq = solve_equilibrium(params, mu, kc, v_star)
        report["v_star"] = v_star
        report["v_star_source"] = v_star_source or {"kind": "assumed"}
        report["v_star_within_bound"] = lo < v_star <= hi
        report["equilibrium"] = {
            "case": eq.case_label.value,
            "delta": eq.delta,
            "case_gain_bound": eq.gain_bound,
            "points": [{"x1": e.x1, "x2": e.x2, "I": e.integrator, "verdict": e.verdict,
                        "rh_margin": e.margin, "I_positive": e.integrator_positive}
                       for e in eq.equilibria],
        }
    return report


def ergodicity_report(params: NetworkParams, grid_bound: int) -> dict:
    cert = certify_drift(params, grid_bound)
    return {
        "k1": params.k1,
        "certificate": cert.as_dict(),
        "mean_x1_bound": moment_bound(params, (1.0, 0.0)),
        "mean_V_bound": moment_bound(params, NU_STAR),
    }


def _variance_signal(ms, trace=None):
    if ms.variance_csv is not None:
        return TabulatedVariance.from_trace(reporting.read_csv(ms.variance_csv))
    if ms.variance == "zero":
        return ZeroVariance()
    if ms.variance == "replay":
        return TabulatedVariance.from_trace(trace)
    return ConstantVariance(float(ms.variance))


def _moment_run(config: ExperimentConfig, trace: EnsembleTrace | None = None):
    ms = config.moments
    v = _variance_signal(ms, trace)
    if ms.mode == "open-loop":
        return integrate_open(MomentState(ms.x1, ms.x2), config.network, v, ms.t_final, ms.dt)
    return integrate_closed_loop(MomentState(ms.x1, ms.x2, ms.i), config.network,
                                 config.controller, v, ms.t_final, ms.dt)


def run_experiment(config: ExperimentConfig) -> list[Path]:
    """Run one configured experiment; returns the paths written."""
    runner = _RUNNERS[config.kind]
    writers = runner(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [write(out) for write in writers]
    log.info("%s: wrote %d files to %s", config.kind, len(paths), out)
    return paths


def _closed_loop(config):
    trace = run_closed_loop(config.simulation, config.network, config.controller)
    return trace, [lambda out: reporting.emit_csv(trace, out / "trace.csv"),
                   lambda out: reporting.emit_cell_csv(trace, out / "cell.csv")]


def _run_closed_loop_ssa(config):
    return _closed_loop(config)[1]


def _run_sweep(config):
    sw = config.sweep
    rng = np.random.default_rng(config.seed)
    rows = stationary_sweep(sw.k1_values, config.network, sw.horizon, rng, n_cells=sw.n_cells,
                            sample_dt=sw.sample_dt, burn_in=sw.burn_in)
    return [lambda out: reporting.emit_sweep_csv(rows, out / "sweep.csv")]


def _run_moments(config):
    traj = _moment_run(config)
    return [lambda out: reporting.emit_trajectory_csv(traj, out / "moments.csv")]


def _run_stability(config):
    c = config.controller
    v_star, source = config.v_star, None
    if config.trace_csv is not None:
        trace = reporting.read_csv(config.trace_csv)
        v_star = tail_average(trace, "var_x1", config.tail_fraction)
        source = _source(config.trace_csv, trace, config.tail_fraction)
    report = stability_report(config.network, c.mu, c.kc, v_star, source)
    return [lambda out: reporting.write_report(out / "stability_report.json", report)]


def _source(csv_name, trace, fraction):
    s = trace.tail(fraction)
    return {"kind": "ssa_trace", "csv": str(csv_name), "column": "var_x1",
            "statistic": "mean", "t_from": float(trace.t[s][0]),
            "t_to": float(trace.t[-1]), "n_samples": int(len(trace.t[s]))}


def _run_ergodicity(config):
    report = ergodicity_report(config.network, config.grid_bound)
    return [lambda out: reporting.write_report(out / "ergodicity_report.json", report)]


def _run_full(config):
    trace, writers = _closed_loop(config)
    c, p, frac = config.controller, config.network, config.tail_fraction
    v_star = tail_average(trace, "var_x1", frac)
    stab = stability_report(p, c.mu, c.kc, v_star, _source("trace.csv", trace, frac))

    u_star = tail_average(trace, "u", frac)
    erg = ergodicity_report(p.with_k1(u_star), config.grid_bound)
    erg["k1_source"] = {"kind": "ssa_trace", "csv": "trace.csv", "column": "u",
                        "statistic": "mean", "t_from": stab["v_star_source"]["t_from"]}
    erg["ssa_mean_x1"] = tail_average(trace, "mean_x1", frac)
    erg["ssa_mean_V"] = erg["ssa_mean_x1"] + 2.0 * tail_average(trace, "mean_x2", frac)

    x0 = MomentState(float(trace.mean_x1[0]), float(trace.mean_x2[0]), c.integrator)
    ms = config.moments
    dt = ms.dt if ms is not None else 1e-3
    traj = integrate_closed_loop(x0, p, c, TabulatedVariance.from_trace(trace),
                                 float(trace.t[-1]), dt)

    hi = variance_bound(p, c.mu)[1]
    summary = {
        "seed": config.seed,
        "n_cells": config.simulation.n_cells,
        "tail_fraction": frac,
        "tail_mean_x2": tail_average(trace, "mean_x2", frac),
        "tail_var_x1": v_star,
        "variance_upper_bound": hi,
        "uniform_gain_bound": stab["uniform_gain_bound"],
        "case": stab["equilibrium"]["case"],
        "moment_replay_final_x2": float(traj.x2[-1]),
    }
    writers += [
        lambda out: reporting.emit_trajectory_csv(traj, out / "moments_replay.csv"),
        lambda out: reporting.emit_plot(trace, "cell", out / "fig_cell.svg"),
        lambda out: reporting.emit_plot(trace, "means", out / "fig_means.svg", mu=c.mu),
        lambda out: reporting.emit_plot(trace, "variances", out / "fig_variances.svg",
                                        variance_upper=hi),
        lambda out: reporting.write_report(out / "stability_report.json", stab),
        lambda out: reporting.write_report(out / "ergodicity_report.json", erg),
        lambda out: reporting.write_report(out / "summary.json", summary),
    ]
    return writers


_RUNNERS = {
    "closed-loop-ssa": _run_closed_loop_ssa,
    "open-loop-sweep": _run_sweep,
    "moment-ode": _run_moments,
    "stability-report": _run_stability,
    "ergodicity-report": _run_ergodicity,
    "full-paper-repro": _run_full,
}

