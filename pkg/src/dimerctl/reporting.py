"""CSV, SVG and JSON artifacts."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .ssa import EnsembleTrace

TRACE_COLUMNS = EnsembleTrace.COLUMNS
PLOT_KINDS = ("cell", "means", "variances")


def _fmt(x) -> str:
    # repr of a Python float is the shortest string that round-trips exactly
    return repr(float(x))


def write_table(path, columns: dict[str, np.ndarray]) -> Path:
    path = Path(path)
    names = list(columns)
    n = len(next(iter(columns.values()))) if columns else 0
    if n == 0:
        raise ValueError("refusing to write an empty table")
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for row in zip(*(columns[k] for k in names)):
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path


def read_table(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: data[:, j] for j, name in enumerate(header)}


def emit_csv(trace: EnsembleTrace, path) -> Path:
    """Write ``t, mean_x1, mean_x2, var_x1, var_x2, u, I`` one row per sample."""
    if len(trace) == 0:
        raise ValueError("trace is empty")
    return write_table(path, trace.columns())


def read_csv(path) -> EnsembleTrace:
    cols = read_table(path)
    missing = [c for c in TRACE_COLUMNS if c not in cols]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    return EnsembleTrace(t=cols["t"], mean_x1=cols["mean_x1"], mean_x2=cols["mean_x2"],
                         var_x1=cols["var_x1"], var_x2=cols["var_x2"], u=cols["u"],
                         integrator=cols["I"])


def emit_cell_csv(trace: EnsembleTrace, path) -> Path:
    if trace.cell_x1 is None:
        raise ValueError("trace carries no single-cell trajectory")
    return write_table(path, {"t": trace.t, "x1": trace.cell_x1, "x2": trace.cell_x2})


def emit_trajectory_csv(traj, path) -> Path:
    cols = {"t": traj.t, "x1": traj.x1, "x2": traj.x2}
    if traj.i is not None:
        cols["I"] = traj.i
    cols["k1"] = traj.k1
    cols["v"] = traj.v
    return write_table(path, cols)


def emit_sweep_csv(rows, path) -> Path:
    return write_table(path, {
        "k1": [r.k1 for r in rows], "mean_x1": [r.mean_x1 for r in rows],
        "mean_x2": [r.mean_x2 for r in rows], "var_x1": [r.var_x1 for r in rows],
    })


def emit_plot(trace: EnsembleTrace, kind: str, path, mu: float | None = None,
              variance_upper: float | None = None) -> Path:
    """Static SVG: ``cell`` (one cell's copy numbers), ``means`` or ``variances``.

    ``variances`` draws ``variance_upper`` as a dashed horizontal line when given.
    """
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    if len(trace) == 0:
        raise ValueError("trace is empty")
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "dimerctl"
    fig, ax = plt.subplots(figsize=(6, 3.5))
    t = trace.t
    if kind == "cell":
        if trace.cell_x1 is None:
            plt.close(fig)
            raise ValueError("trace carries no single-cell trajectory")
        ax.step(t, trace.cell_x1, where="post", lw=0.6, label="X1 (monomer)")
        ax.step(t, trace.cell_x2, where="post", lw=0.6, label="X2 (dimer)")
        ax.set_ylabel("copy number")
    elif kind == "means":
        ax.plot(t, trace.mean_x1, lw=0.8, label="mean X1")
        ax.plot(t, trace.mean_x2, lw=0.8, label="mean X2")
        if mu is not None:
            ax.axhline(mu, color="k", lw=0.6, ls=":", label="reference")
        ax.set_ylabel("population mean")
    else:
        ax.plot(t, trace.var_x1, lw=0.8, label="Var X1")
        ax.plot(t, trace.var_x2, lw=0.8, label="Var X2")
        if variance_upper is not None:
            ax.axhline(variance_upper, color="k", lw=0.8, ls="--",
                       label="equilibrium bound on Var X1")
        ax.set_ylabel("population variance")
    ax.set_xlabel("time")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    path = Path(path)
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_report(path, report: dict) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path
