from math import sqrt

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from netfd.ito_core import TimeGrid
from netfd.op_expansion import tilde_conjugate
from netfd import xx_model as xx

kappas = st.floats(0.0, 2.0)
nbars = st.floats(0.0, 3.0)
positive = st.floats(0.2, 3.0)


def P(**kw):
    base = dict(m=1.3, omega=0.9, kappa=0.4, nbar=0.7, grid=TimeGrid(1e-2, 30))
    base.update(kw)
    return xx.XxParams(**base)


@given(positive, positive, kappas, nbars)
def test_martingale_report(m, omega, kappa, nbar):
    r = xx.martingale_report(P(m=m, omega=omega, kappa=kappa, nbar=nbar))
    assert max(abs(v) for v in r.values()) < 1e-12


# at k = 0 both operators vanish and the coefficients are undetermined
@given(st.floats(0.05, 2.0), nbars)
def test_stratonovich_report(kappa, nbar):
    r = xx.stratonovich_report(P(kappa=kappa, nbar=nbar))
    assert r["stratonovich_residual"] < 1e-12 and r["minus_residual"] < 1e-12
    assert abs(r["stratonovich_pi_r"] - 1) < 1e-9 and abs(r["stratonovich_pi_d"]) < 1e-9
    assert abs(r["minus_pi_r"] - 1) < 1e-9 and abs(r["minus_pi_d"] + 1) < 1e-9


@given(positive, positive, kappas, nbars)
def test_langevin_drift_differs_by_the_imaginary_term(m, omega, kappa, nbar):
    r = xx.ito_formula_discrepancy(P(m=m, omega=omega, kappa=kappa, nbar=nbar))
    assert r["unexplained"] < 1e-12
    assert r["injection_difference"] < 1e-12
    assert r["imaginary_term"] == pytest.approx(4j * kappa * m * omega * (nbar + 0.5))


def test_increments_are_tilde_symmetric():
    inc = xx.langevin_increments(P())
    assert inc["xtil"].residual(tilde_conjugate(inc["x"])) == 0
    assert inc["ptil"].residual(tilde_conjugate(inc["p"])) == 0


@given(kappas, nbars)
def test_bra_kramers(kappa, nbar):
    r = xx.bra_kramers(P(kappa=kappa, nbar=nbar))
    assert r.max_residual < 1e-12


def test_projected_mean_is_damped_oscillator():
    p = P(nbar=0.0, grid=TimeGrid(1e-2, 200))
    r = xx.bra_kramers(p)
    dt, k, w, m = p.grid.dt, p.kappa, p.omega, p.m
    A = np.array([[1.0, dt / m], [-m * w * w * dt, 1 - 2 * k * dt]])
    v = np.array([1.0, 0.0])
    for _ in range(p.grid.n_steps):
        v = A @ v
    assert r.mean_x_coeff[-1] == pytest.approx(v[0], abs=1e-12)


def test_a_form_noise_against_rwa():
    p = P(kappa=0.5)
    c = xx.projected_a_noise_coefficients(p)
    assert c["dB"] == pytest.approx(-1j * sqrt(0.5))
    assert c["dBdag"] == pytest.approx(-1j * sqrt(0.5))
    r = xx.rwa_coefficient_comparison(p)
    assert r["ratio"] == pytest.approx(1 / sqrt(2))
    assert r["xx_couples_to_dBdag"] and not r["rwa_couples_to_dBdag"]


def test_pi_projects_to_zero():
    assert xx.bra_projects_pi(P()) < 1e-15


def test_xp_ccr():
    p = P(kappa=0.0, grid=TimeGrid(1e-3, 1000))
    c = xx.xp_ccr_trace(p)
    assert c[0] == pytest.approx(1j)
    # symplectic-Euler-like drift keeps the error first order
    assert abs(c[-1] - 1j) < 5 * p.grid.dt
    p2 = P(kappa=0.5, grid=TimeGrid(1e-3, 1000))
    assert abs(xx.xp_ccr_trace(p2)[-1] - 1j) < 5 * p2.grid.dt


def test_params():
    with pytest.raises(ValueError):
        P(m=0.0)
    with pytest.raises(ValueError):
        P(kappa=-0.1)
    assert P().noise_scale == pytest.approx(2 * sqrt(0.4 * 1.3 * 0.9))
    assert xx.XxParams.from_temperature(1.0, 0.0).nbar == 0.0
