from math import sqrt

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from fock import NoiseOracle
from netfd.ito_core import (
    InvalidInputError, InvalidParameterError, NoiseTables, TimeGrid, bogoliubov_checks,
    check_ordering, composite_increments, compose_dW_moments,
)
from netfd.labels import RWA_NOISE, XX_NOISE, NoiseLabel
from netfd.op_expansion import tilde_conjugate

nbars = st.floats(0.0, 3.0)


def test_time_grid():
    g = TimeGrid.from_t_max(1e-4, 1.0)
    assert g.n_steps == 10_000
    assert g.times[-1] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InvalidParameterError):
        TimeGrid(0.0, 10)
    with pytest.raises(InvalidParameterError):
        TimeGrid(1e-3, 0)


@pytest.mark.parametrize("nbar", [0.0, 0.3, 1.0, 2.5])
@pytest.mark.parametrize("model,kinds", [("rwa", RWA_NOISE), ("xx", XX_NOISE)])
def test_moment_table_matches_doubled_fock_oracle(nbar, model, kinds):
    dt = 1e-3
    tab = NoiseTables(nbar, dt, model)
    oracle = NoiseOracle(nbar, dt)
    for x in kinds:
        for y in kinds:
            want = oracle.moment(x, y)
            got = tab.moment(NoiseLabel(x, 3), NoiseLabel(y, 3))
            assert abs(got - want) < 1e-10, (x, y)


def test_rwa_moment_table():
    tab = NoiseTables(0.7, 1e-2)
    m = lambda x, y: tab.moment(NoiseLabel(x, 0), NoiseLabel(y, 0))
    assert m("dBdag", "dB") == pytest.approx(0.7e-2)
    assert m("dB", "dBdag") == pytest.approx(1.7e-2)
    assert m("dBtil", "dB") == pytest.approx(0.7e-2)
    assert m("dBtildag", "dBdag") == pytest.approx(1.7e-2)
    assert m("dB", "dB") == 0


@given(nbars)
def test_distinct_steps_decorrelate_and_commutators_are_dt(nbar):
    tab = NoiseTables(nbar, 1e-3)
    for x in RWA_NOISE:
        for y in RWA_NOISE:
            assert tab.moment(NoiseLabel(x, 0), NoiseLabel(y, 1)) == 0
    c = tab.commutator(NoiseLabel("dB", 2), NoiseLabel("dBdag", 2))
    assert c == pytest.approx(1e-3)
    ct = tab.commutator(NoiseLabel("dBtil", 2), NoiseLabel("dBtildag", 2))
    assert ct == pytest.approx(1e-3)


@given(nbars)
def test_xx_increments_commute(nbar):
    tab = NoiseTables(nbar, 1e-3, "xx")
    for x in XX_NOISE:
        for y in XX_NOISE:
            assert tab.commutator(NoiseLabel(x, 0), NoiseLabel(y, 0)) == 0
            assert tab.moment(NoiseLabel(x, 0), NoiseLabel(y, 0)) == pytest.approx((nbar + 0.5) * 1e-3)


def test_mixed_models_rejected():
    tab = NoiseTables(0.5, 1e-3)
    with pytest.raises(InvalidInputError):
        tab.moment(NoiseLabel("dB", 0), NoiseLabel("dX", 0))
    with pytest.raises(InvalidParameterError):
        NoiseTables(-0.1, 1e-3)


def test_ordering_parameter():
    assert check_ordering(0.25) == pytest.approx(0.75)
    with pytest.raises(InvalidParameterError):
        check_ordering(0.3, 0.3)


class P:
    def __init__(self, kappa, nu):
        self.kappa, self.nu = kappa, nu


@given(st.floats(0.05, 2.0), nbars, st.floats(-0.5, 1.5))
def test_composite_moments(kappa, nbar, nu):
    dt = 1e-3
    m = compose_dW_moments(P(kappa, nu), NoiseTables(nbar, dt))
    assert m[("dW", "dWtil")] == pytest.approx(2 * kappa * (nbar + nu) * dt, abs=1e-14)
    assert m[("dW", "dWc")] == pytest.approx(2 * kappa * dt, abs=1e-14)
    assert abs(m[("dWc", "dW")]) < 1e-14
    assert abs(m[("dWc", "dWctil")]) < 1e-14
    assert abs(m[("dW", "dW")]) < 1e-14


def test_composite_examples():
    m = compose_dW_moments(P(1.0, 0.5), NoiseTables(1.0, 1e-3))
    assert m[("dW", "dWtil")] == pytest.approx(3e-3)
    inc = composite_increments(1.0, 0.5, 0)
    assert inc["dW"].coeff(NoiseLabel("dB", 0)) == pytest.approx(sqrt(2) / 2)
    assert inc["dWtil"].residual(tilde_conjugate(inc["dW"])) == 0


@pytest.mark.parametrize("nbar", [0.0, 0.5, 1.0, 5.0])
def test_bogoliubov(nbar):
    r = bogoliubov_checks(nbar)
    assert abs(r["det"] - 1) < 1e-12
    assert r["max_violation"] < 1e-12
    comm = r["doublet_commutators"]
    assert comm[(0, 0)] == pytest.approx(1e-3) and comm[(1, 1)] == pytest.approx(1e-3)
    assert abs(comm[(0, 1)]) < 1e-15 and abs(comm[(1, 0)]) < 1e-15


def test_bogoliubov_rejects_negative():
    with pytest.raises(InvalidParameterError):
        bogoliubov_checks(-1.0)
