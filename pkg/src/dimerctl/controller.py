"""Pure integral control of the production rate.

The integrator accumulates the tracking error ``mu - x2`` and the production
rate is ``kc * max(0, I)``. Only the output is clamped; ``I`` itself may run
negative and recover.
"""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ControllerState:
    integrator: float
    kc: float
    mu: float
    ts: float = 0.01

    def __post_init__(self):
        if not self.kc > 0:
            raise ValueError(f"kc must be > 0, got {self.kc!r}")
        if not self.mu > 0:
            raise ValueError(f"mu must be > 0, got {self.mu!r}")
        if not self.ts > 0:
            raise ValueError(f"ts must be > 0, got {self.ts!r}")


def saturate(i: float) -> float:
    return i if i > 0.0 else 0.0


def control_output(c: ControllerState) -> float:
    """Production rate commanded by the controller, always >= 0."""
    return c.kc * saturate(c.integrator)


def integrate_error(c: ControllerState, y: float, dt: float) -> ControllerState:
    """Explicit Euler step of the integrator with observed mean dimer count ``y``."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    return replace(c, integrator=c.integrator + dt * (c.mu - y))
