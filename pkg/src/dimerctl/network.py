"""Dimerization network: stoichiometry, propensities and the Markov generator.

Reactions, in order::

    R1: 0 -> S1          rate k1
    R2: S1 + S1 -> S2    rate b
    R3: S1 -> 0          rate gamma1
    R4: S2 -> 0          rate gamma2
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

# columns are reactions R1..R4, rows are species (S1, S2)
STOICHIOMETRY = np.array([[1, -2, -1, 0],
                          [0, 1, 0, -1]], dtype=np.int64)
STOICHIOMETRY.setflags(write=False)

N_REACTIONS = 4


@dataclass(frozen=True)
class NetworkParams:
    """Rate constants of the dimerization network.

    All rates must be finite and nonnegative. The analysis routines that divide
    by ``b``, ``gamma1`` or ``gamma2`` call :meth:`require_positive`; the
    simulator accepts degenerate networks (e.g. pure birth) so it can be
    checked against closed-form processes.
    """

    k1: float
    b: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        for name in ("k1", "b", "gamma1", "gamma2"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")

    def require_positive(self) -> "NetworkParams":
        for name in ("b", "gamma1", "gamma2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        return self

    def with_k1(self, k1: float) -> "NetworkParams":
        return replace(self, k1=float(k1))


@dataclass(frozen=True)
class CellState:
    """Copy numbers of monomer (x1) and dimer (x2) in one cell."""

    x1: int
    x2: int

    def __post_init__(self):
        for name in ("x1", "x2"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")
            if value >= 2**63:
                raise OverflowError(f"{name} overflows a 64-bit counter")
            object.__setattr__(self, name, int(value))

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2], dtype=np.int64)


def propensity_arrays(x1, x2, params: NetworkParams) -> np.ndarray:
    """Vectorized propensities; returns shape ``x1.shape + (4,)``."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    return np.stack([
        np.full_like(x1, params.k1),
        0.5 * params.b * x1 * (x1 - 1.0),
        params.gamma1 * x1,
        params.gamma2 * x2,
    ], axis=-1)


def propensities(state: CellState, params: NetworkParams) -> np.ndarray:
    """Reaction rates ``(k1, b/2 x1 (x1-1), gamma1 x1, gamma2 x2)``."""
    x1, x2 = state.x1, state.x2
    return np.array([
        params.k1,
        0.5 * params.b * x1 * (x1 - 1),
        params.gamma1 * x1,
        params.gamma2 * x2,
    ], dtype=np.float64)


def apply_reaction(state: CellState, reaction: int) -> CellState:
    """Fire reaction ``reaction`` (1-based, R1..R4) and return the new state."""
    if not 1 <= reaction <= N_REACTIONS:
        raise IndexError(f"reaction index must be in 1..4, got {reaction}")
    dx1, dx2 = STOICHIOMETRY[:, reaction - 1]
    x1, x2 = state.x1 + int(dx1), state.x2 + int(dx2)
    if x1 < 0 or x2 < 0:
        raise RuntimeError(
            f"R{reaction} fired from {state} and produced a negative count")
    return CellState(x1, x2)


def generator_apply(f: Callable, state, params: NetworkParams):
    """Apply the Markov generator to a test function.

    Returns ``sum_k w_k(x) * (f(x + s_k) - f(x))``. ``f`` is called as
    ``f(x1, x2)``. ``state`` is either a :class:`CellState` or a pair of integer
    arrays, in which case ``f`` must accept arrays and the result is an array.

    Transitions with zero propensity contribute nothing even when ``x + s_k``
    leaves the nonnegative orthant, so ``f`` is only evaluated where needed in
    the scalar case.
    """
    if isinstance(state, CellState):
        w = propensities(state, params)
        fx = f(state.x1, state.x2)
        total = 0.0
        for k in range(N_REACTIONS):
            if w[k] == 0.0:
                continue
            dx1, dx2 = STOICHIOMETRY[:, k]
            total += w[k] * (f(state.x1 + int(dx1), state.x2 + int(dx2)) - fx)
        return total

    x1, x2 = (np.asarray(a, dtype=np.int64) for a in state)
    w = propensity_arrays(x1, x2, params)
    fx = f(x1, x2)
    total = np.zeros(np.broadcast(x1, x2).shape, dtype=np.float64)
    for k in range(N_REACTIONS):
        dx1, dx2 = STOICHIOMETRY[:, k]
        # w is exactly 0 wherever x + s_k would be negative
        diff = f(x1 + dx1, x2 + dx2) - fx
        total += np.where(w[..., k] != 0.0, w[..., k] * diff, 0.0)
    return total


def linear_weight(nu) -> Callable:
    """``V(x) = nu . x`` as a test function for :func:`generator_apply`."""
    nu1, nu2 = nu
    return lambda x1, x2: nu1 * x1 + nu2 * x2
