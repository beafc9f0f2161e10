"""Equilibria, local stability and controller-gain bounds of the closed loop.

The equilibrium mean monomer count solves

    x1^2 - x1 + v* - 2*gamma2*mu/b = 0

for an assumed stationary variance ``v*``. Writing ``Delta = 1 + 4(2 gamma2 mu/b - v*)``
and ``zeta = sqrt(Delta)``, the stable branch is ``x1* = (1 + zeta)/2`` and the
Routh-Hurwitz conditions of its Jacobian reduce to ``kc < f(zeta)`` with

    f(zeta) = 2 gamma2 (gamma1 + gamma2 + b zeta)(gamma1 + b zeta) / (b zeta).

The minimum of ``f`` over ``zeta > 0`` does not depend on ``b`` or ``mu``, which
gives a single gain bound that is valid for every reference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .network import NetworkParams

DELTA_TOL = 1e-12
MARGIN_TOL = 1e-9


class Case(str, Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    NO_REAL_EQUILIBRIUM = "NoRealEquilibrium"


@dataclass(frozen=True)
class RouthHurwitz:
    verdict: str  # "stable" | "unstable" | "marginal"
    margin: float
    coefficients: tuple[float, float, float]  # a2, a1, a0 of s^3 + a2 s^2 + a1 s + a0

    @property
    def stable(self) -> bool:
        return self.verdict == "stable"


@dataclass(frozen=True)
class Equilibrium:
    x1: float
    x2: float
    integrator: float
    verdict: str
    margin: float
    integrator_positive: bool


@dataclass(frozen=True)
class EquilibriumReport:
    case_label: Case
    delta: float
    equilibria: list[Equilibrium] = field(default_factory=list)
    gain_bound: float | None = None

    def stable_equilibria(self):
        return [e for e in self.equilibria if e.verdict == "stable"]


@dataclass(frozen=True)
class ParamBox:
    """Interval bounds ``[lo, hi]`` on gamma1, gamma2 and b."""

    gamma1: tuple[float, float]
    gamma2: tuple[float, float]
    b: tuple[float, float]

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "b"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} interval must satisfy 0 < lo <= hi, got {(lo, hi)}")

    def corner(self, gamma1="lo", gamma2="lo", b="lo", k1=0.0) -> NetworkParams:
        pick = {"lo": 0, "hi": 1}
        return NetworkParams(k1, self.b[pick[b]], self.gamma1[pick[gamma1]],
                             self.gamma2[pick[gamma2]])


def discriminant(params: NetworkParams, mu: float, v_star: float) -> float:
    return 1.0 + 4.0 * (2.0 * params.gamma2 * mu / params.b - v_star)


def equilibrium_integrator(params: NetworkParams, mu: float, kc: float, x1_star: float) -> float:
    """Integrator value at which production balances losses: ``kc*I* = gamma1 x1* + 2 gamma2 mu``."""
    return (params.gamma1 * x1_star + 2.0 * params.gamma2 * mu) / kc


def jacobian(params: NetworkParams, x1_star: float, kc: float) -> np.ndarray:
    """Jacobian of ``(x1, x2, I)`` at an equilibrium with ``I* > 0``."""
    b, g1, g2 = params.b, params.gamma1, params.gamma2
    return np.array([
        [b - g1 - 2.0 * b * x1_star, 0.0, kc],
        [-0.5 * b + b * x1_star, -g2, 0.0],
        [0.0, -1.0, 0.0],
    ])


def characteristic_coefficients(a: np.ndarray) -> tuple[float, float, float]:
    """``(a2, a1, a0)`` of ``det(sI - A) = s^3 + a2 s^2 + a1 s + a0``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    a2 = -np.trace(a)
    a1 = (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
          + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
          + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
    a0 = -np.linalg.det(a)
    return float(a2), float(a1), float(a0)


def routh_hurwitz_3x3(a, tol: float = MARGIN_TOL) -> RouthHurwitz:
    a2, a1, a0 = characteristic_coefficients(a)
    margin = min(a2, a0, a2 * a1 - a0)
    if margin > tol:
        verdict = "stable"
    elif margin < -tol:
        verdict = "unstable"
    else:
        verdict = "marginal"
    return RouthHurwitz(verdict, margin, (a2, a1, a0))


def gain_bound_function(params: NetworkParams, zeta):
    """``f(zeta)``, the supremum of admissible gains at ``sqrt(Delta) = zeta``."""
    b, g1, g2 = params.b, params.gamma1, params.gamma2
    bz = b * np.asarray(zeta, dtype=float)
    return 2.0 * g2 * (g1 + g2 + bz) * (g1 + bz) / bz


def gain_bound_case(params: NetworkParams, delta: float) -> float:
    """Admissible gain supremum for the stable equilibrium branch at ``Delta``."""
    params.require_positive()
    if not delta > DELTA_TOL:
        raise ValueError(
            f"Delta={delta!r} <= 0: no stable equilibrium exists for any gain")
    return float(gain_bound_function(params, math.sqrt(delta)))


def optimal_zeta(params: NetworkParams) -> float:
    """Minimizer of :func:`gain_bound_function` over ``zeta > 0``."""
    g1, g2 = params.gamma1, params.gamma2
    return math.sqrt(g1 * (g1 + g2)) / params.b


def uniform_gain_bound(params: NetworkParams) -> float:
    """Gain supremum valid for every ``mu > 0`` and ``b > 0``."""
    g1, g2 = params.gamma1, params.gamma2
    if not (g1 > 0 and g2 > 0):
        raise ValueError("gamma1 and gamma2 must be > 0")
    return 2.0 * g2 * (2.0 * g1 + g2 + 2.0 * math.sqrt(g1 * (g1 + g2)))


def robust_gain_bound(box: ParamBox) -> float:
    # increasing in gamma1 and gamma2, independent of b
    return uniform_gain_bound(box.corner("lo", "lo", "lo"))


def variance_bound(params: NetworkParams | ParamBox, mu: float) -> tuple[float, float]:
    """Interval ``(0, hi]`` containing any equilibrium variance with a real equilibrium.

    For a :class:`ParamBox` the worst corner ``gamma2 = hi, b = lo`` is used.
    """
    if not mu > 0:
        raise ValueError(f"mu must be > 0, got {mu!r}")
    if isinstance(params, ParamBox):
        g2, b = params.gamma2[1], params.b[0]
    else:
        params.require_positive()
        g2, b = params.gamma2, params.b
    return 0.0, 2.0 * g2 * mu / b + 0.25


def solve_equilibrium(params: NetworkParams, mu: float, kc: float,
                      v_star: float) -> EquilibriumReport:
    """Equilibria in the positive orthant for an assumed stationary variance."""
    params.require_positive()
    if not mu > 0:
        raise ValueError(f"mu must be > 0, got {mu!r}")
    if not kc > 0:
        raise ValueError(f"kc must be > 0, got {kc!r}")
    if not v_star >= 0:
        raise ValueError(f"v_star must be >= 0, got {v_star!r}")

    threshold = 2.0 * params.gamma2 * mu / params.b
    c = v_star - threshold
    delta = 1.0 + 4.0 * (threshold - v_star)

    if delta < -DELTA_TOL:
        return EquilibriumReport(Case.NO_REAL_EQUILIBRIUM, delta)

    if abs(delta) <= DELTA_TOL:
        # double root at 1/2; the Jacobian has a zero-determinant direction
        eq = _equilibrium(params, mu, kc, 0.5, force="unstable")
        return EquilibriumReport(Case.CASE3, delta, [eq], None)

    zeta = math.sqrt(delta)
    upper = 0.5 * (1.0 + zeta)
    lower = c / upper  # product of the roots is c; no cancellation

    if math.isclose(v_star, threshold, rel_tol=1e-12, abs_tol=1e-15):
        case, roots = Case.CASE2, [0.0, 1.0]
    elif c < 0:
        case, roots = Case.CASE1, [upper]
    else:
        case, roots = Case.CASE3, [lower, upper]

    eqs = [_equilibrium(params, mu, kc, x1) for x1 in roots]
    return EquilibriumReport(case, delta, eqs, gain_bound_case(params, delta))


def _equilibrium(params, mu, kc, x1, force=None) -> Equilibrium:
    i_star = equilibrium_integrator(params, mu, kc, x1)
    rh = routh_hurwitz_3x3(jacobian(params, x1, kc))
    verdict = force or rh.verdict
    return Equilibrium(x1, mu, i_star, verdict, rh.margin, i_star > 0)


@dataclass(frozen=True)
class LinearFallacyReport:
    simplified_matrix: np.ndarray
    simplified_determinant: float
    simplified_verdict: str
    upper_block_hurwitz: bool
    true_matrix: np.ndarray | None = None
    true_verdict: str | None = None
    true_x1: float | None = None

    def lines(self) -> list[str]:
        out = [f"linearized-without-quadratic: {self.simplified_verdict} "
               f"(det = {self.simplified_determinant:.6g} > 0)"]
        if not self.upper_block_hurwitz:
            out.append("linearized-without-quadratic: open-loop 2x2 block not Hurwitz "
                       "(b - gamma1 > 0)")
        if self.true_verdict is not None:
            out.append(f"true linearization at x1*={self.true_x1:.6g}: {self.true_verdict}")
        return out


def simplified_linear_matrix(params: NetworkParams, kc: float) -> np.ndarray:
    """Closed loop with the quadratic and variance terms dropped from the means."""
    b, g1, g2 = params.b, params.gamma1, params.gamma2
    return np.array([[b - g1, 0.0, kc], [-0.5 * b, -g2, 0.0], [0.0, -1.0, 0.0]])


def demo_linear_fallacy(params: NetworkParams, kc: float, mu: float | None = None,
                        v_star: float | None = None) -> LinearFallacyReport:
    """Contrast the linear model without quadratic terms against the true Jacobian.

    The simplified matrix has determinant ``b*kc/2 > 0`` and is never Hurwitz.
    If ``mu`` and ``v_star`` are given, the stable equilibrium is located and the
    verdict of its actual Jacobian is included.
    """
    a = simplified_linear_matrix(params, kc)
    rh = routh_hurwitz_3x3(a)
    g1, b = params.gamma1, params.b
    # 2x2 lower-triangular block: Hurwitz iff both diagonal entries are negative
    block_hurwitz = (b - g1) < 0
    true_a = true_verdict = true_x1 = None
    if mu is not None and v_star is not None:
        report = solve_equilibrium(params, mu, kc, v_star)
        if report.equilibria:
            true_x1 = max(e.x1 for e in report.equilibria)
            true_a = jacobian(params, true_x1, kc)
            true_verdict = routh_hurwitz_3x3(true_a).verdict
    return LinearFallacyReport(a, float(np.linalg.det(a)), rh.verdict, block_hurwitz,
                               true_a, true_verdict, true_x1)
