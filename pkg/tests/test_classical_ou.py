from math import exp

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from netfd.ito_core import InvalidParameterError, TimeGrid
from netfd import classical_ou as ou


def P(**kw):
    base = dict(m=1.0, gamma=1.0, T=1.0, grid=TimeGrid(1e-2, 100), n_traj=2000, seed=7)
    base.update(kw)
    return ou.ClassicalParams(**base)


def test_force_increment_variance():
    p = P(m=2.0, gamma=0.5, T=1.5)
    x = ou.sample_dR(ou.chunk_rng(1, 0), p, 1_000_000)
    assert abs(x.var() / (2 * 2.0 * 0.5 * 1.5 * 1e-2) - 1) < 0.01
    assert abs(x.mean()) < 5 * p.noise_std / 1000


def test_step_examples():
    p = P(grid=TimeGrid(0.1, 1))
    assert ou.step_ou(1.0, 0.0, p) == pytest.approx(0.9)
    assert ou.step_ou(0.0, 0.3, P(m=2.0, grid=TimeGrid(0.1, 1))) == pytest.approx(0.15)
    assert ou.sample_dR(ou.chunk_rng(0, 0), P(T=0.0)) == 0.0


@given(st.floats(0.0, 10.0), st.floats(-3, 3), st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0, 3))
def test_fp_moments(t, u0, m, gamma, T):
    p = P(m=m, gamma=gamma, T=T)
    mean, var = ou.fp_moments_analytic(t, u0, p)
    assert mean == pytest.approx(u0 * exp(-gamma * t))
    assert var == pytest.approx(T / m * (1 - exp(-2 * gamma * t)), rel=1e-12, abs=1e-15)
    assert 0 <= var <= T / m * (1 + 1e-15)


def test_fp_moments_arrays_and_errors():
    mean, var = ou.fp_moments_analytic(np.array([0.0, 1.0]), 1.0, P())
    assert mean.shape == (2,) and var[0] == 0
    with pytest.raises(InvalidParameterError):
        ou.fp_moments_analytic(-1.0, 0.0, P())


def test_zero_temperature_is_deterministic():
    p = P(T=0.0)
    est = ou.mc_estimate(ou.simulate(p, u0=1.0))
    assert np.all(est.var == 0)
    assert np.abs(est.mean - ou.deterministic_path(1.0, p)).max() < 1e-14


def test_ensemble_moments_agree_with_fokker_planck():
    p = P(n_traj=20000, grid=TimeGrid(1e-2, 300))
    est = ou.mc_estimate(ou.simulate(p, u0=1.0))
    mean, var = ou.fp_moments_analytic(est.times, 1.0, p)
    # bias is O(dt); allow it on top of the statistical error
    assert np.all(np.abs(est.mean - mean) < 4 * est.stderr_mean + 1e-2)
    assert np.all(np.abs(est.var - var) < 4 * est.stderr_var + 1e-2)


def test_weak_order_one():
    # small T keeps the statistical error well below the O(dt) bias
    errs = []
    for dt in (0.2, 0.1, 0.05):
        p = P(T=0.01, grid=TimeGrid.from_t_max(dt, 2.0), n_traj=4000)
        est = ou.mc_estimate(ou.simulate(p, u0=1.0))
        errs.append(abs(est.mean[-1] - exp(-2.0)))
    r1, r2 = errs[0] / errs[1], errs[1] / errs[2]
    assert 1.6 < r1 < 2.4 and 1.6 < r2 < 2.4


def test_stationary_variance_of_the_scheme():
    p = P(grid=TimeGrid(0.1, 1))
    assert ou.euler_stationary_variance(p) == pytest.approx(2 * 0.1 / (1 - 0.81))


def test_common_random_numbers_match_separate_runs():
    p = P(n_traj=300, grid=TimeGrid(1e-2, 20))
    both = ou.simulate(p, u0=[0.0, 1.0])
    for acc, u0 in zip(both, (0.0, 1.0)):
        single = ou.simulate(p, u0=u0)
        a, b = ou.mc_estimate(acc), ou.mc_estimate(single)
        assert np.abs(a.mean - b.mean).max() < 1e-12
        assert np.abs(a.var - b.var).max() < 1e-12


def test_determinism_and_chunk_order():
    p = P(n_traj=500, grid=TimeGrid(1e-2, 10))
    a = ou.simulate(p, u0=0.5, store=True)[1].u
    b = ou.simulate(p, u0=0.5, store=True)[1].u
    assert np.array_equal(a, b)
    c = ou.simulate(p.__class__(**{**p.__dict__, "seed": 8}), u0=0.5, store=True)[1].u
    assert not np.array_equal(a, c)
    # chunking partitions the ensemble; a prefix of a larger run is unchanged
    small = ou.simulate(p, u0=0.5, store=True, chunk=100)[1].u
    big = ou.simulate(P(n_traj=700, grid=TimeGrid(1e-2, 10)), u0=0.5, store=True, chunk=100)[1].u
    assert np.array_equal(small, big[:500])


def test_stored_and_streamed_estimates_agree():
    p = P(n_traj=400, grid=TimeGrid(1e-2, 15))
    acc, ens = ou.simulate(p, u0=0.3, store=True)
    a, b = ou.mc_estimate(acc), ou.mc_estimate(ens)
    assert np.abs(a.var - b.var).max() < 1e-12
    assert np.abs(a.mean - b.mean).max() < 1e-12


@settings(max_examples=20)
@given(st.integers(5, 60))
def test_probability_is_conserved(bins):
    ens = ou.simulate(P(n_traj=500, grid=TimeGrid(1e-2, 30)), store=True)[1]
    for j in (0, 10, 30):
        assert ou.probability_conservation_check(ens.u[:, j], bins) == pytest.approx(1.0)


def test_validation():
    for kw in (dict(m=0.0), dict(gamma=-1.0), dict(T=-1.0), dict(n_traj=0), dict(seed=-1)):
        with pytest.raises(InvalidParameterError):
            P(**kw)
    with pytest.raises(InvalidParameterError):
        ou.mc_estimate(ou.simulate(P(n_traj=1)))
    with pytest.raises(InvalidParameterError):
        ou.probability_conservation_check([])
