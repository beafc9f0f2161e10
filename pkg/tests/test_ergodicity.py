import numpy as np
import pytest

from dimerctl.ergodicity import (NU_STAR, UnsupportedWeightError, certify_drift, grid,
                                 moment_bound)
from dimerctl.network import NetworkParams
from dimerctl.ssa import advance_ensemble

from conftest import EXAMPLE, random_params


def test_certificate_example():
    cert = certify_drift(EXAMPLE, 50)
    assert (cert.c1, cert.c2, cert.c3, cert.c4) == (1.0, 1.0, 1.0, 2.0)
    assert cert.all_satisfied and cert.closed_forms_match and cert.witness is None
    assert cert.nu == NU_STAR and cert.checked_grid_bound == 50


def test_certificate_without_production():
    cert = certify_drift(EXAMPLE.with_k1(0.0), 30)
    assert cert.c1 == 0.0 and cert.all_satisfied


def test_min_max_selection():
    cert = certify_drift(NetworkParams(1.0, 3.0, 5.0, 1.0), 10)
    assert cert.c2 == 1.0 and cert.c4 == 5.0


def test_grid_bound_validated():
    with pytest.raises(ValueError):
        certify_drift(EXAMPLE, 5)


def test_grid_shape():
    x1, x2 = grid(10)
    assert len(x1) == 121 and x1.max() == 10 and x2.max() == 10


def test_random_parameters_certified(rng):
    for _ in range(50):
        cert = certify_drift(random_params(rng), 60)
        assert cert.all_satisfied and cert.closed_forms_match


def test_violation_is_reported(monkeypatch):
    # break the constant to check that a witness comes back
    import dimerctl.ergodicity as erg
    monkeypatch.setattr(erg, "drift_constants", lambda p: (p.k1, 10 * p.gamma2, p.k1, 0.0))
    cert = erg.certify_drift(EXAMPLE, 10)
    assert not cert.all_satisfied and cert.witness is not None


def test_moment_bounds():
    assert moment_bound(EXAMPLE.with_k1(1.0), (1, 0)) == 0.5
    assert moment_bound(EXAMPLE.with_k1(0.0), (1, 0)) == 0.0
    u = 13.9
    assert moment_bound(EXAMPLE.with_k1(u), (1, 2)) == pytest.approx(u / 1.0)
    with pytest.raises(UnsupportedWeightError):
        moment_bound(EXAMPLE, (1, 3))
    with pytest.raises(UnsupportedWeightError):
        moment_bound(EXAMPLE, (0, 1))


def test_closed_loop_mean_V_below_bound(example_trace):
    s = example_trace.tail(1 / 3)
    u_star = example_trace.u[s].mean()
    v_mean = example_trace.mean_x1[s].mean() + 2 * example_trace.mean_x2[s].mean()
    assert v_mean <= moment_bound(EXAMPLE.with_k1(u_star), NU_STAR)


def test_ssa_long_run_mean_V_within_band(rng):
    for _ in range(10):
        p = random_params(rng)
        p = p.with_k1(min(p.k1, 10.0))
        bound = moment_bound(p, NU_STAR)
        x = np.zeros((400, 2), dtype=np.int64)
        relax = 10.0 / min(p.gamma1, p.gamma2)
        advance_ensemble(x, p, relax, rng)
        samples = []
        for _ in range(40):
            advance_ensemble(x, p, 0.25 * relax, rng)
            samples.append(x[:, 0] + 2 * x[:, 1])
        samples = np.array(samples, dtype=float)
        per_cell = samples.mean(axis=0)
        sigma = per_cell.std(ddof=1) / np.sqrt(per_cell.size)
        assert per_cell.mean() <= bound + 3 * sigma
