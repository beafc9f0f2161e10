"""Foster-Lyapunov drift certificates for the dimerization network.

With the linear weight ``V(x) = x1 + 2 x2`` dimerization leaves ``V``
unchanged, so the generator gives

    LV(x)            = k1 - gamma1 x1 - 2 gamma2 x2   <= c1 - c2 V(x)
    L(V^2) - 2 V LV  = k1 + gamma1 x1 + 4 gamma2 x2   <= c3 + c4 V(x)

with ``c1 = c3 = k1``, ``c2 = min(gamma1, gamma2)``, ``c4 = max(gamma1, 2 gamma2)``.
The second line is the quadratic variation ``sum_k w_k (nu . s_k)^2``.

Irreducibility is structural and not checked at runtime: production and both
degradations are positive whenever their reactant is present (and k1 > 0), so
every state reaches (0, 0) and every state is reached from it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import NetworkParams, generator_apply, linear_weight

NU_STAR = (1.0, 2.0)
DEFAULT_GRID = 200
_REL_TOL = 1e-12


class UnsupportedWeightError(ValueError):
    pass


@dataclass(frozen=True)
class DriftCertificate:
    nu: tuple[float, float]
    c1: float
    c2: float
    c3: float
    c4: float
    checked_grid_bound: int
    all_satisfied: bool
    closed_forms_match: bool
    witness: tuple[int, int] | None = None

    def as_dict(self) -> dict:
        return {
            "nu": list(self.nu), "c1": self.c1, "c2": self.c2, "c3": self.c3,
            "c4": self.c4, "checked_grid_bound": self.checked_grid_bound,
            "all_satisfied": self.all_satisfied,
            "closed_forms_match": self.closed_forms_match,
            "witness": None if self.witness is None else list(self.witness),
        }


def drift_constants(params: NetworkParams) -> tuple[float, float, float, float]:
    g1, g2 = params.gamma1, params.gamma2
    return params.k1, min(g1, g2), params.k1, max(g1, 2.0 * g2)


def grid(bound: int):
    """All states with ``0 <= x1, x2 <= bound`` as two flat int arrays."""
    x1, x2 = np.meshgrid(np.arange(bound + 1), np.arange(bound + 1), indexing="ij")
    return x1.ravel(), x2.ravel()


def _close(a, b, scale):
    return np.abs(a - b) <= _REL_TOL * np.maximum(scale, 1.0)


def certify_drift(params: NetworkParams, grid_bound: int = DEFAULT_GRID) -> DriftCertificate:
    """Check both drift inequalities for ``nu = (1, 2)`` on a finite grid.

    ``LV`` and the quadratic variation are computed from the generator by brute
    force and compared with their closed forms. A failure returns a certificate
    with ``all_satisfied=False`` and the first offending state.
    """
    params.require_positive()
    if grid_bound < 10:
        raise ValueError(f"grid_bound must be >= 10, got {grid_bound}")
    k1, g1, g2 = params.k1, params.gamma1, params.gamma2
    c1, c2, c3, c4 = drift_constants(params)
    x1, x2 = grid(grid_bound)
    x1f, x2f = x1.astype(float), x2.astype(float)

    V = linear_weight(NU_STAR)
    v = V(x1f, x2f)
    lv = generator_apply(V, (x1, x2), params)
    lv2 = generator_apply(lambda a, b: V(a, b) ** 2, (x1, x2), params)
    qv = lv2 - 2.0 * v * lv

    # scale for roundoff: the largest individual term entering the sums
    scale = np.abs(lv2) + 2.0 * np.abs(v * lv) + params.b * x1f * x1f
    lv_closed = k1 - g1 * x1f - 2.0 * g2 * x2f
    qv_closed = k1 + g1 * x1f + 4.0 * g2 * x2f
    forms_ok = _close(lv, lv_closed, np.abs(lv_closed) + params.b * x1f * x1f) & _close(
        qv, qv_closed, scale)

    ok_a = lv <= c1 - c2 * v + _REL_TOL * np.maximum(np.abs(lv) + c2 * v, 1.0)
    ok_b = qv <= c3 + c4 * v + _REL_TOL * np.maximum(scale, 1.0)
    ok = ok_a & ok_b & forms_ok
    witness = None
    if not ok.all():
        j = int(np.flatnonzero(~ok)[0])
        witness = (int(x1[j]), int(x2[j]))
    return DriftCertificate(NU_STAR, c1, c2, c3, c4, grid_bound, bool(ok.all()),
                            bool(forms_ok.all()), witness)


def moment_bound(params: NetworkParams, nu=(1.0, 0.0)) -> float:
    """Asymptotic upper bound ``c1/c2`` on ``E[nu . X]``.

    Supported weights satisfy ``nu1 > 0`` and ``0 <= nu2 <= 2 nu1``: then the
    dimerization term of ``LV`` is nonpositive and ``LV <= k1 nu1 - c2 V`` with
    ``c2 = gamma1`` for ``nu2 = 0`` and ``min(gamma1, gamma2)`` otherwise.
    ``nu = (1, 0)`` is not strictly positive, so the ergodicity theorem does not
    apply to it as such; it is the limit of ``(1, eps)`` and only the bound on
    the mean is claimed.
    """
    nu1, nu2 = (float(a) for a in nu)
    if not nu1 > 0 or not 0 <= nu2 <= 2.0 * nu1:
        raise UnsupportedWeightError(f"no linear drift bound derived for nu={tuple(nu)}")
    c1 = params.k1 * nu1
    c2 = params.gamma1 if nu2 == 0 else min(params.gamma1, params.gamma2)
    if not c2 > 0:
        raise ValueError("degradation rates must be > 0")
    return c1 / c2
