"""Planck occupation, the kinetic equation for n(t), and its flow counterpart.

The one-particle distribution n(t) = <<1| adag(t) a(t) |0>> is evaluated on
the Heisenberg coefficient flow by bra-projection and pair contraction and
compared against the closed form n(t) = nbar + (n0 - nbar) e^{-2 k t}.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import exp, expm1

import numpy as np

from .ito_core import InvalidParameterError
from .op_expansion import InitialState


def planck_nbar(omega: float, T: float) -> float:
    """1 / (e^{w/T} - 1); zero at T = 0."""
    if not omega > 0:
        raise InvalidParameterError("omega must be positive")
    if T < 0:
        raise InvalidParameterError("temperature must be non-negative")
    if T == 0:
        return 0.0
    x = omega / T
    if x > 700.0:
        return exp(-x)  # 1/expm1 overflows; the two agree to double precision here
    return 1.0 / expm1(x)


@dataclass(frozen=True)
class KineticState:
    n0: float
    nbar: float
    kappa: float

    def __post_init__(self):
        if self.n0 < 0 or self.nbar < 0:
            raise InvalidParameterError("occupations must be non-negative")


def kinetic_n(t, state: KineticState):
    """Solution of dn/dt = -2 k (n - nbar); accepts scalars or arrays."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InvalidParameterError("t must be non-negative")
    out = state.nbar + (state.n0 - state.nbar) * np.exp(-2.0 * state.kappa * t_arr)
    return float(out) if out.ndim == 0 else out


@dataclass
class KineticsSeries:
    times: np.ndarray
    n_flow: np.ndarray
    n_kinetic: np.ndarray

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.n_flow - self.n_kinetic)

    @property
    def max_deviation(self) -> float:
        return float(self.deviation.max())


def flow_occupation(flow, state: InitialState) -> np.ndarray:
    """Advance ``flow`` to the end of its grid, returning n(t_j) at each step."""
    n = flow.grid.n_steps - flow.step_index
    out = np.empty(n + 1)
    for j in range(n + 1):
        val = flow.pair_expectation("adag", "a", state)
        out[j] = val.real
        if j < n:
            flow.advance()
    return out


def master_consistency(flow, state: InitialState, params) -> KineticsSeries:
    """Flow-derived n(t) against the kinetic equation over the flow's grid."""
    t = flow.grid.times[flow.step_index:]
    n_flow = flow_occupation(flow, state)
    ks = KineticState(state.n0, params.nbar, params.kappa)
    return KineticsSeries(t, n_flow, kinetic_n(t, ks))


def run_kinetics(params, n0: float) -> KineticsSeries:
    from .rwa_model import HeisenbergFlow

    flow = HeisenbergFlow(params)
    return master_consistency(flow, InitialState(n0=n0, omega=params.omega), params)


def relaxation_time(kappa: float) -> float:
    return 1.0 / (2.0 * kappa) if kappa > 0 else float("inf")


def detailed_balance_ratio(omega: float, T: float) -> float:
    """nbar / (nbar + 1) = e^{-w/T}."""
    return exp(-omega / T) if T > 0 else 0.0
