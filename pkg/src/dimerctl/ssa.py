"""Exact stochastic simulation (Gillespie direct method) of dimerizing cells.

Two code paths share the same propensities:

* :func:`simulate_cell_segment` advances one cell with a scalar event loop.
* :func:`advance_ensemble` advances an ``(n, 2)`` array of cells at once. Every
  cell still follows its own exact jump process; the loop is over event
  *rounds* rather than cells, so a round costs a handful of numpy calls.

Because the waiting times are exponential, discarding the pending event at a
segment boundary and drawing a fresh one from the new propensities is exact.
That is what makes holding ``k1`` piecewise constant between controller
samples cheap.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .controller import ControllerState, control_output, integrate_error
from .network import STOICHIOMETRY, CellState, NetworkParams, propensity_arrays

log = logging.getLogger(__name__)

_JUMPS = np.ascontiguousarray(STOICHIOMETRY.T)


class SimulationError(RuntimeError):
    """Simulation failed; carries the seed and the model time of failure."""

    def __init__(self, message: str, seed=None, time=None):
        super().__init__(f"{message} (seed={seed}, t={time})")
        self.seed = seed
        self.time = time


@dataclass(frozen=True)
class SimulationConfig:
    """Ensemble simulation settings.

    ``initial_states`` is either an ``(n_cells, 2)`` array-like of copy numbers,
    or one of the rules ``"random01"`` (each coordinate uniform in {0, 1}) and
    ``"zeros"``.
    """

    n_cells: int
    t_final: float
    ts: float
    seed: int = 0
    initial_states: object = "random01"
    record_cell: int | None = 0

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ValueError(f"n_cells must be a positive integer, got {self.n_cells!r}")
        if not self.ts > 0:
            raise ValueError(f"ts must be > 0, got {self.ts!r}")
        if not self.ts <= self.t_final:
            raise ValueError(f"ts ({self.ts}) must not exceed t_final ({self.t_final})")
        if isinstance(self.initial_states, str):
            if self.initial_states not in INITIAL_RULES:
                raise ValueError(f"unknown initial-state rule {self.initial_states!r}")
        else:
            x0 = np.asarray(self.initial_states)
            if x0.shape != (self.n_cells, 2):
                raise ValueError(
                    f"initial_states must have shape ({self.n_cells}, 2), got {x0.shape}")
            if (x0 < 0).any() or not np.array_equal(x0, np.round(x0)):
                raise ValueError("initial_states must be nonnegative integers")
        if self.record_cell is not None and not 0 <= self.record_cell < self.n_cells:
            raise ValueError(f"record_cell {self.record_cell} out of range")

    @property
    def n_samples(self) -> int:
        return int(round(self.t_final / self.ts)) + 1

    def time_grid(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.ts


INITIAL_RULES = ("random01", "zeros")


def initial_ensemble(config: SimulationConfig, rng: np.random.Generator) -> np.ndarray:
    if isinstance(config.initial_states, str):
        if config.initial_states == "zeros":
            return np.zeros((config.n_cells, 2), dtype=np.int64)
        return rng.integers(0, 2, size=(config.n_cells, 2), dtype=np.int64)
    return np.array(config.initial_states, dtype=np.int64)


@dataclass
class EnsembleTrace:
    """Per-sample ensemble statistics.

    Row ``i`` holds the statistics of the cells at ``t[i]``, the integrator value
    ``I[i]`` at that instant and the input ``u[i] = kc*max(0, I[i])`` that is
    held on ``[t[i], t[i+1])``. Variances are population variances over cells.
    """

    t: np.ndarray
    mean_x1: np.ndarray
    mean_x2: np.ndarray
    var_x1: np.ndarray
    var_x2: np.ndarray
    u: np.ndarray
    integrator: np.ndarray
    cell_x1: np.ndarray | None = None
    cell_x2: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    COLUMNS = ("t", "mean_x1", "mean_x2", "var_x1", "var_x2", "u", "I")

    def __len__(self):
        return len(self.t)

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "t": self.t, "mean_x1": self.mean_x1, "mean_x2": self.mean_x2,
            "var_x1": self.var_x1, "var_x2": self.var_x2,
            "u": self.u, "I": self.integrator,
        }

    def tail(self, fraction: float) -> slice:
        """Slice selecting the samples with ``t >= (1 - fraction) * t[-1]``."""
        start = np.searchsorted(self.t, (1.0 - fraction) * self.t[-1] - 1e-12)
        return slice(int(start), None)


def simulate_cell_segment(state: CellState, params: NetworkParams, t0: float, t1: float,
                          rng: np.random.Generator) -> CellState:
    """Exact state of one cell at ``t1`` given ``state`` at ``t0``."""
    if not t1 > t0:
        raise ValueError(f"need t1 > t0, got t0={t0}, t1={t1}")
    state, _, _ = _run_cell(state, params, t1 - t0, rng)
    return state


def time_average_cell(state: CellState, params: NetworkParams, t_final: float,
                      rng: np.random.Generator, burn_in: float = 0.0):
    """Exact time averages of (X1, X2) over ``[burn_in, t_final]`` for one path.

    Returns ``(mean_x1, mean_x2, n_jumps)`` where ``n_jumps`` counts all events.
    """
    if burn_in > 0:
        state, _, n0 = _run_cell(state, params, burn_in, rng)
    else:
        n0 = 0
    state, occupancy, n = _run_cell(state, params, t_final - burn_in, rng)
    span = t_final - burn_in
    return occupancy[0] / span, occupancy[1] / span, n + n0


def _run_cell(state: CellState, params: NetworkParams, horizon: float,
              rng: np.random.Generator):
    x1, x2 = state.x1, state.x2
    k1, half_b, g1, g2 = params.k1, 0.5 * params.b, params.gamma1, params.gamma2
    t = 0.0
    occ1 = occ2 = 0.0
    n_jumps = 0
    while True:
        a1 = k1
        a2 = half_b * x1 * (x1 - 1)
        a3 = g1 * x1
        a4 = g2 * x2
        a0 = a1 + a2 + a3 + a4
        if a0 <= 0.0:
            occ1 += x1 * (horizon - t)
            occ2 += x2 * (horizon - t)
            break
        dt = rng.exponential() / a0
        if t + dt >= horizon:
            occ1 += x1 * (horizon - t)
            occ2 += x2 * (horizon - t)
            break
        occ1 += x1 * dt
        occ2 += x2 * dt
        t += dt
        r = rng.random() * a0
        if r < a1:
            x1 += 1
        elif r < a1 + a2:
            x1 -= 2
            x2 += 1
        elif r < a1 + a2 + a3:
            x1 -= 1
        else:
            x2 -= 1
        n_jumps += 1
    return CellState(x1, x2), (occ1, occ2), n_jumps


def advance_ensemble(x: np.ndarray, params: NetworkParams, dt: float,
                     rng: np.random.Generator) -> np.ndarray:
    """Advance every cell in ``x`` (shape ``(n, 2)``, int64) by ``dt`` in place."""
    a = propensity_arrays(x[:, 0], x[:, 1], params)
    a0 = a.sum(axis=1)
    with np.errstate(divide="ignore"):
        t = rng.standard_exponential(len(x)) / a0
    idx = np.flatnonzero(t < dt)
    while idx.size:
        a = propensity_arrays(x[idx, 0], x[idx, 1], params)
        cum = np.cumsum(a, axis=1)
        r = rng.random(idx.size) * cum[:, -1]
        k = (r[:, None] >= cum).sum(axis=1)
        np.minimum(k, 3, out=k)
        xi = x[idx] + _JUMPS[k]
        if (xi < 0).any():
            raise SimulationError("negative copy number after a reaction")
        x[idx] = xi
        a0 = propensity_arrays(xi[:, 0], xi[:, 1], params).sum(axis=1)
        with np.errstate(divide="ignore"):
            t[idx] += rng.standard_exponential(idx.size) / a0
        idx = idx[t[idx] < dt]
    return x


def run_closed_loop(config: SimulationConfig, params: NetworkParams,
                    controller: ControllerState) -> EnsembleTrace:
    """Sampled-data closed loop of an ensemble under integral control.

    At each sample: ``u = kc*max(0, I)`` from the current ``I``; then
    ``I += ts*(mu - y)``; then every cell advances by ``ts`` with ``k1 = u``;
    then ``y`` is the ensemble mean of X2. ``params.k1`` is ignored.
    """
    if not np.isclose(controller.ts, config.ts, rtol=1e-12, atol=0.0):
        raise ValueError(
            f"controller ts ({controller.ts}) disagrees with simulation ts ({config.ts})")
    rng = np.random.default_rng(config.seed)
    x = initial_ensemble(config, rng)
    n = config.n_samples
    out = {name: np.empty(n) for name in ("m1", "m2", "v1", "v2", "u", "I")}
    cell = config.record_cell
    cx1 = np.empty(n, dtype=np.int64) if cell is not None else None
    cx2 = np.empty(n, dtype=np.int64) if cell is not None else None

    def record(i, u):
        out["m1"][i] = x[:, 0].mean()
        out["m2"][i] = x[:, 1].mean()
        out["v1"][i] = x[:, 0].var()
        out["v2"][i] = x[:, 1].var()
        out["u"][i] = u
        out["I"][i] = c.integrator
        if cell is not None:
            cx1[i], cx2[i] = x[cell]

    c = controller
    y = x[:, 1].mean()
    for i in range(n - 1):
        u = control_output(c)
        record(i, u)
        c = integrate_error(c, y, config.ts)
        try:
            advance_ensemble(x, params.with_k1(u), config.ts, rng)
        except SimulationError as exc:
            raise SimulationError(str(exc), seed=config.seed, time=i * config.ts) from exc
        y = x[:, 1].mean()
    record(n - 1, control_output(c))

    return EnsembleTrace(
        t=config.time_grid(), mean_x1=out["m1"], mean_x2=out["m2"],
        var_x1=out["v1"], var_x2=out["v2"], u=out["u"], integrator=out["I"],
        cell_x1=cx1, cell_x2=cx2,
        meta={"seed": config.seed, "n_cells": config.n_cells, "ts": config.ts,
              "kc": controller.kc, "mu": controller.mu},
    )


@dataclass(frozen=True)
class SweepRow:
    k1: float
    mean_x1: float
    mean_x2: float
    var_x1: float


def stationary_sweep(k1_values: Sequence[float], params: NetworkParams, horizon: float,
                     rng: np.random.Generator, n_cells: int = 500,
                     sample_dt: float = 0.1, burn_in: float = 0.5) -> list[SweepRow]:
    """Open-loop stationary statistics for each production rate.

    Each ``k1`` runs an ensemble of ``n_cells`` cells started at (0, 0) up to
    ``horizon``; statistics on the sample grid after ``burn_in * horizon`` are
    averaged over samples (means over cells and time, variance over cells then
    time).
    """
    k1_values = [float(k) for k in k1_values]
    if any(k < 0 for k in k1_values):
        raise ValueError("k1 values must be nonnegative")
    if any(b < a for a, b in zip(k1_values, k1_values[1:])):
        raise ValueError("k1 values must be sorted")
    n_steps = int(round(horizon / sample_dt))
    first = int(np.ceil(burn_in * n_steps))
    rows = []
    for k1 in k1_values:
        p = params.with_k1(k1)
        x = np.zeros((n_cells, 2), dtype=np.int64)
        m1 = m2 = v1 = 0.0
        count = 0
        for step in range(1, n_steps + 1):
            advance_ensemble(x, p, sample_dt, rng)
            if step >= first:
                m1 += x[:, 0].mean()
                m2 += x[:, 1].mean()
                v1 += x[:, 0].var()
                count += 1
        rows.append(SweepRow(k1, m1 / count, m2 / count, v1 / count))
        log.debug("sweep k1=%g -> %s", k1, rows[-1])
    return rows
