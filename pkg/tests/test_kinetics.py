from math import exp, log

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from netfd.ito_core import InvalidParameterError, TimeGrid
from netfd.kinetics import (
    KineticState, detailed_balance_ratio, kinetic_n, planck_nbar, relaxation_time, run_kinetics,
)
from netfd.rwa_model import RwaParams


def test_planck_examples():
    assert planck_nbar(log(2.0), 1.0) == pytest.approx(1.0, abs=1e-14)
    assert planck_nbar(1.0, 1.0) == pytest.approx(0.5819767068693265, rel=1e-12)
    assert planck_nbar(1.0, 0.0) == 0.0
    assert planck_nbar(1.0, 1e-3) < 1e-300
    with pytest.raises(InvalidParameterError):
        planck_nbar(1.0, -1.0)
    with pytest.raises(InvalidParameterError):
        planck_nbar(0.0, 1.0)


@given(st.floats(0.05, 5.0), st.floats(0.05, 5.0))
def test_detailed_balance(omega, T):
    n = planck_nbar(omega, T)
    assert n / (n + 1) == pytest.approx(detailed_balance_ratio(omega, T), rel=1e-10)


@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.01, 2.0))
def test_kinetic_solution(n0, nbar, kappa):
    s = KineticState(n0, nbar, kappa)
    assert kinetic_n(0.0, s) == pytest.approx(n0)
    assert kinetic_n(50.0 / kappa, s) == pytest.approx(nbar, abs=1e-12)
    t = np.linspace(0, 3, 301)
    n = kinetic_n(t, s)
    dn = np.gradient(n, t)
    assert np.abs(dn + 2 * kappa * (n - nbar))[1:-1].max() < 1e-3 * (1 + abs(n0 - nbar)) * kappa ** 3 + 1e-9
    # monotone relaxation
    assert np.all(np.diff(n) * np.sign(nbar - n0) >= -1e-15)


def test_kinetic_validation():
    with pytest.raises(InvalidParameterError):
        KineticState(-1.0, 0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        kinetic_n(-1.0, KineticState(1.0, 0.0, 1.0))
    assert relaxation_time(0.0) == float("inf")
    assert relaxation_time(0.5) == 1.0


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_flow_occupation_follows_kinetic_law(lam):
    p = RwaParams(kappa=0.5, nbar=planck_nbar(1.0, 1.0), lam=lam, grid=TimeGrid.from_t_max(1e-3, 2.0))
    s = run_kinetics(p, n0=1.0)
    assert s.n_flow[0] == pytest.approx(1.0)
    assert s.max_deviation < 5e-3
    # first order in dt
    s2 = run_kinetics(p.with_(grid=TimeGrid.from_t_max(2e-3, 2.0)), n0=1.0)
    assert 1.6 < s2.max_deviation / s.max_deviation < 2.4


def test_occupation_lambda_independent_without_nu():
    g = TimeGrid.from_t_max(1e-2, 1.0)
    a = run_kinetics(RwaParams(nbar=0.5, lam=0.0, nu=0.0, grid=g), 1.0)
    b = run_kinetics(RwaParams(nbar=0.5, lam=1.0, nu=0.0, grid=g), 1.0)
    assert np.abs(a.n_flow - b.n_flow).max() < 1e-12


def test_occupation_lambda_gap_is_first_order_in_dt():
    gaps = []
    for dt in (4e-3, 2e-3):
        g = TimeGrid.from_t_max(dt, 1.0)
        a = run_kinetics(RwaParams(nbar=0.5, lam=0.0, nu=0.5, grid=g), 1.0)
        b = run_kinetics(RwaParams(nbar=0.5, lam=1.0, nu=0.5, grid=g), 1.0)
        gaps.append(np.abs(a.n_flow - b.n_flow).max())
    assert gaps[1] > 0
    assert 1.6 < gaps[0] / gaps[1] < 2.4


def test_vacuum_stays_vacuum_at_zero_temperature():
    s = run_kinetics(RwaParams(nbar=0.0, grid=TimeGrid(1e-2, 50)), n0=0.0)
    assert np.abs(s.n_flow).max() < 1e-15
