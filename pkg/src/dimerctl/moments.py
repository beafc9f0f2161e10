"""First-order moment equations with the monomer variance as an external input.

The mean dynamics are not closed: ``d x1/dt`` and ``d x2/dt`` depend on
``v = Var(X1)``, which is supplied as a :class:`VarianceSignal` rather than
expressed through the means.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerState, saturate
from .network import NetworkParams

log = logging.getLogger(__name__)

NEGATIVE_TOL = 1e-9
DEFAULT_DT = 1e-3


class NonFiniteStateError(FloatingPointError):
    def __init__(self, time: float, state):
        super().__init__(f"state became non-finite at t={time:.6g}: {state}")
        self.time = time
        self.state = state


@dataclass(frozen=True)
class MomentState:
    x1: float
    x2: float
    i: float = 0.0


class VarianceSignal:
    """Base class; subclasses are callables ``t -> v(t) >= 0``."""

    label = "variance"

    def __call__(self, t: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantVariance(VarianceSignal):
    v0: float

    def __post_init__(self):
        if not self.v0 >= 0:
            raise ValueError(f"variance must be >= 0, got {self.v0!r}")

    @property
    def label(self):
        return f"constant v={self.v0:g}"

    def __call__(self, t):
        return self.v0


class ZeroVariance(ConstantVariance):
    """``v = 0``: the deterministic (mean-field) closure.

    Only meant to show what goes wrong when the variance input is dropped.
    """

    label = "zero variance (deterministic closure, not a valid model)"

    def __init__(self):
        super().__init__(0.0)


@dataclass(frozen=True)
class TabulatedVariance(VarianceSignal):
    """Piecewise-linear interpolation of sampled variances, held flat outside."""

    t: np.ndarray
    v: np.ndarray
    label: str = "tabulated"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if t.shape != v.shape or t.ndim != 1 or t.size == 0:
            raise ValueError("t and v must be 1-d arrays of equal nonzero length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("variance samples must be >= 0")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_trace(cls, trace) -> "TabulatedVariance":
        return cls(trace.t, trace.var_x1, label="replayed from SSA ensemble")

    def __call__(self, t):
        return float(np.interp(t, self.t, self.v))


def moment_rhs(s: MomentState, params: NetworkParams, v: float, k1: float | None = None):
    """Time derivative of ``(x1, x2)``; ``k1`` overrides ``params.k1`` if given."""
    if v < 0:
        raise ValueError(f"variance must be >= 0, got {v!r}")
    k1 = params.k1 if k1 is None else k1
    b, g1, g2 = params.b, params.gamma1, params.gamma2
    x1, x2 = s.x1, s.x2
    sq = x1 * x1 + v
    return (k1 + (b - g1) * x1 - b * sq,
            -0.5 * b * x1 - g2 * x2 + 0.5 * b * sq)


@dataclass
class Trajectory:
    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    k1: np.ndarray
    v: np.ndarray
    i: np.ndarray | None = None
    warnings: list[str] = field(default_factory=list)

    def state(self, n: int = -1) -> MomentState:
        return MomentState(self.x1[n], self.x2[n], 0.0 if self.i is None else self.i[n])


def _rk4(f, z0, t_final: float, dt: float):
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if not t_final > 0:
        raise ValueError(f"t_final must be > 0, got {t_final!r}")
    n = int(round(t_final / dt))
    t = np.arange(n + 1) * dt
    z = np.empty((n + 1, len(z0)))
    z[0] = z0
    zk = np.asarray(z0, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(n):
            zk = _rk4_step(f, t[j], zk, dt)
            if not np.all(np.isfinite(zk)):
                raise NonFiniteStateError(t[j + 1], zk)
            z[j + 1] = zk
    return t, z


def _rk4_step(f, tj, zk, dt):
    s1 = f(tj, zk)
    s2 = f(tj + 0.5 * dt, zk + 0.5 * dt * s1)
    s3 = f(tj + 0.5 * dt, zk + 0.5 * dt * s2)
    s4 = f(tj + dt, zk + dt * s3)
    return zk + (dt / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4)


def _check_sign(t, x1, x2, warnings):
    for name, arr in (("x1", x1), ("x2", x2)):
        bad = np.flatnonzero(arr < -NEGATIVE_TOL)
        if bad.size:
            msg = (f"{name} went negative (min {arr.min():.3g}) from t={t[bad[0]]:.4g}; "
                   "the variance input is not admissible for these means")
            log.warning(msg)
            warnings.append(msg)


def integrate_open(s0: MomentState, params: NetworkParams, v: VarianceSignal,
                   t_final: float, dt: float = DEFAULT_DT) -> Trajectory:
    """Fixed-step RK4 solution of the open moment system with constant ``k1``."""
    b, g1, g2, k1 = params.b, params.gamma1, params.gamma2, params.k1

    def f(t, z):
        vt = v(t)
        sq = z[0] * z[0] + vt
        return np.array([k1 + (b - g1) * z[0] - b * sq,
                         -0.5 * b * z[0] - g2 * z[1] + 0.5 * b * sq])

    t, z = _rk4(f, [s0.x1, s0.x2], t_final, dt)
    traj = Trajectory(t=t, x1=z[:, 0], x2=z[:, 1], k1=np.full_like(t, k1),
                      v=np.array([v(tj) for tj in t]))
    _check_sign(t, traj.x1, traj.x2, traj.warnings)
    return traj


def integrate_closed_loop(s0: MomentState, params: NetworkParams, controller: ControllerState,
                          v: VarianceSignal, t_final: float,
                          dt: float = DEFAULT_DT) -> Trajectory:
    """RK4 solution of the means plus integrator with ``k1 = kc*max(0, I)``.

    ``params.k1`` is ignored; ``controller.integrator`` is not used either, the
    starting integrator value is ``s0.i``.
    """
    b, g1, g2 = params.b, params.gamma1, params.gamma2
    kc, mu = controller.kc, controller.mu

    def f(t, z):
        vt = v(t)
        sq = z[0] * z[0] + vt
        return np.array([kc * saturate(z[2]) + (b - g1) * z[0] - b * sq,
                         -0.5 * b * z[0] - g2 * z[1] + 0.5 * b * sq,
                         mu - z[1]])

    t, z = _rk4(f, [s0.x1, s0.x2, s0.i], t_final, dt)
    traj = Trajectory(t=t, x1=z[:, 0], x2=z[:, 1], i=z[:, 2],
                      k1=kc * np.maximum(z[:, 2], 0.0),
                      v=np.array([v(tj) for tj in t]))
    _check_sign(t, traj.x1, traj.x2, traj.warnings)
    return traj
