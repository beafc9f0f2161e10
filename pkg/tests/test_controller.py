import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dimerctl.controller import ControllerState, control_output, integrate_error


def test_output_examples():
    assert control_output(ControllerState(-3.0, 1.0, 5.0)) == 0.0
    assert control_output(ControllerState(0.0, 1.0, 5.0)) == 0.0
    g1, g2, mu, kc, x1 = 2.0, 1.0, 5.0, 1.7, 1.9434
    # production at equilibrium balances monomer loss plus two monomers per dimer lost
    i_star = (g1 * x1 + 2 * g2 * mu) / kc
    assert control_output(ControllerState(i_star, kc, mu)) == pytest.approx(g1 * x1 + 2 * g2 * mu)


def test_integrate_examples():
    c = ControllerState(0.0, 1.0, 5.0)
    assert integrate_error(c, 5.0, 0.01).integrator == 0.0
    assert integrate_error(c, 0.0, 0.01).integrator == pytest.approx(0.05)
    prev = c.integrator
    for _ in range(100):
        c = integrate_error(c, 4.5, 0.01)
        assert c.integrator > prev
        prev = c.integrator
    assert c.kc == 1.0 and c.mu == 5.0


def test_invalid():
    with pytest.raises(ValueError):
        ControllerState(0.0, 0.0, 5.0)
    with pytest.raises(ValueError):
        ControllerState(0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate_error(ControllerState(0.0, 1.0, 5.0), 1.0, 0.0)


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(1e-3, 100))
def test_output_monotone_nonnegative(i, j, kc):
    lo, hi = sorted([i, j])
    a = control_output(ControllerState(lo, kc, 1.0))
    b = control_output(ControllerState(hi, kc, 1.0))
    assert 0 <= a <= b
    if lo > 0:
        assert b - a == pytest.approx(kc * (hi - lo), rel=1e-9, abs=1e-9)


def test_euler_first_order_on_ramp():
    # y(t) = t, exact integral of (mu - y) over [0, T] is mu T - T^2/2
    mu, T = 5.0, 2.0
    errors = []
    for n in (100, 200, 400, 800):
        dt = T / n
        c = ControllerState(0.0, 1.0, mu)
        for k in range(n):
            c = integrate_error(c, k * dt, dt)
        errors.append(abs(c.integrator - (mu * T - T * T / 2)))
    ratios = np.array(errors[:-1]) / np.array(errors[1:])
    np.testing.assert_allclose(ratios, 2.0, rtol=1e-6)
