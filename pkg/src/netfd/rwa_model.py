"""Damped oscillator in the rotating-wave approximation.

Quasi-particle operators, relaxational/diffusive damping operators, the
lambda-family of martingales, the Heisenberg coefficient flow of
a, a^dag and their tilde partners, output-field increments and the
commutator decay/restoration experiment.

Flow update (explicit Ito-Euler, one step)::

    da    = (-i w - k) a dt + dW - 2(1-l) nu k (a~dag - a) dt - l nu dW~+o
    dadag = ( i w - k) adag dt + dW~ + 2(1-l) mu k (adag - a~) dt + l mu dW+o

with the tilde equations obtained by tilde conjugation.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import sqrt

import numpy as np

from .ito_core import (
    HatHamiltonian,
    NoiseTables,
    TimeGrid,
    composite_increments,
    hat_hamiltonian_minus,
    ito_to_stratonovich_hamiltonian,
)
from .labels import RWA_NOISE, RWA_SYSTEM, NoiseLabel
from .op_expansion import (
    LinearFlow,
    LinearOp,
    QuadraticOp,
    bra_project,
    commutator_linear,
    dagger,
    generator_matrices,
    ito_increment,
    mixed,
    multiply_contract,
    product,
    tilde_conjugate,
)

FLOW_LABELS = ("a", "adag", "atil", "atildag")


@dataclass(frozen=True)
class RwaParams:
    omega: float = 1.0
    kappa: float = 0.5
    nbar: float = 0.0
    lam: float = 1.0
    nu: float = 0.5
    grid: TimeGrid = field(default_factory=lambda: TimeGrid(1e-3, 1000))

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ValueError("kappa must be non-negative")
        if self.nbar < 0:
            raise ValueError("nbar must be non-negative")

    @property
    def mu(self) -> float:
        return 1.0 - self.nu

    @property
    def tables(self) -> NoiseTables:
        return NoiseTables(self.nbar, self.grid.dt, "rwa")

    @classmethod
    def from_temperature(cls, omega: float, T: float, **kw) -> "RwaParams":
        from .kinetics import planck_nbar

        return cls(omega=omega, nbar=planck_nbar(omega, T), **kw)

    def with_(self, **kw) -> "RwaParams":
        return replace(self, **kw)


# --------------------------------------------------------------------------
# operators


def build_gamma(params: RwaParams, ops: dict | None = None) -> dict:
    """gamma_nu = mu a + nu a~dag and gamma+o = adag - a~ with tilde partners.

    ``ops`` may map the four flow labels onto Heisenberg LinearOps; by
    default the Schroedinger labels themselves are used.
    """
    if ops is None:
        ops = {k: LinearOp.of(k) for k in FLOW_LABELS}
    g_nu = ops["a"] * params.mu + ops["atildag"] * params.nu
    g_c = ops["adag"] - ops["atil"]
    g_nu_t = ops["atil"] * params.mu + ops["adag"] * params.nu
    g_c_t = ops["atildag"] - ops["a"]
    return {"gamma_nu": g_nu, "gamma_c": g_c, "gamma_nu_til": g_nu_t, "gamma_c_til": g_c_t}


def hamiltonian_rwa(params: RwaParams) -> QuadraticOp:
    """H_S - H~_S with H_S = w adag a."""
    a, ad, at, atd = (LinearOp.of(k) for k in ("a", "adag", "atil", "atildag"))
    return product(ad, a) * params.omega - product(atd, at) * params.omega


def build_pi_rwa(params: RwaParams) -> tuple[QuadraticOp, QuadraticOp]:
    g = build_gamma(params)
    pi_r = (product(g["gamma_c"], g["gamma_nu"]) + product(g["gamma_c_til"], g["gamma_nu_til"])) \
        * (-params.kappa)
    pi_d = product(g["gamma_c"], g["gamma_c_til"]) * (2 * params.kappa * (params.nbar + params.nu))
    return pi_r, pi_d


def build_martingale_rwa(lam: float, step: int, params: RwaParams, gammas: dict | None = None):
    """(dM-, dM+, dM) at ``step``; dM+ keeps its increments on the left."""
    g = gammas if gammas is not None else build_gamma(params)
    w = composite_increments(params.kappa, params.nu, step)
    dm_minus = (mixed(g["gamma_c"], w["dW"]) + mixed(g["gamma_c_til"], w["dWtil"])) * 1j
    dm_plus = (mixed(g["gamma_nu"], w["dWc"], side="left")
               + mixed(g["gamma_nu_til"], w["dWctil"], side="left")) * -1j
    return dm_minus, dm_plus, dm_minus + dm_plus * lam


def martingale_identities(lam: float, params: RwaParams, step: int = 0) -> dict:
    """Residuals of the martingale product relations (all should vanish)."""
    tables = params.tables
    dt = tables.dt
    pi_r, pi_d = build_pi_rwa(params)
    m_minus, m_plus, dM = build_martingale_rwa(lam, step, params)
    mm = multiply_contract(m_minus, m_minus, tables)
    mp = multiply_contract(m_minus, m_plus, tables)
    pm = multiply_contract(m_plus, m_minus, tables)
    pp = multiply_contract(m_plus, m_plus, tables)
    full = multiply_contract(dM, dM, tables)
    return {
        "non_commutativity": ((mp - pm) + pi_r * (2 * dt)).max_abs(),
        "fluctuation_dissipation": (full + (pi_r * lam + pi_d) * (2 * dt)).max_abs(),
        "minus_minus": (mm + pi_d * (2 * dt)).max_abs(),
        "minus_plus": (mp + pi_r * (2 * dt)).max_abs(),
        "plus_plus": pp.max_abs(),
        "plus_minus": pm.max_abs(),
    }


def stratonovich_hamiltonian(params: RwaParams, step: int = 0) -> HatHamiltonian:
    pi_r, pi_d = build_pi_rwa(params)
    dM = build_martingale_rwa(params.lam, step, params)[2]
    return ito_to_stratonovich_hamiltonian(hamiltonian_rwa(params), pi_r, pi_d, dM, params.tables)


def minus_hamiltonian(params: RwaParams, step: int = 0) -> HatHamiltonian:
    pi_r, pi_d = build_pi_rwa(params)
    dM = build_martingale_rwa(params.lam, step, params)[2]
    return hat_hamiltonian_minus(hamiltonian_rwa(params), pi_r, pi_d, dM, params.tables)


def hermiticity_residual(params: RwaParams, step: int = 0) -> dict:
    """Compare H_S dt + i(1-l) Pi_R dt + dM with its adjoint."""
    tables = params.tables
    dt = tables.dt
    pi_r, _ = build_pi_rwa(params)
    quad = hamiltonian_rwa(params) * dt + pi_r * (1j * (1 - params.lam) * dt)
    dM = build_martingale_rwa(params.lam, step, params)[2]
    q_res = (quad - dagger(quad, tables)).max_abs()
    m1, m2 = dM.merged_sides(), dagger(dM).merged_sides()
    keys = set(m1) | set(m2)
    m_res = max((abs(m1.get(k, 0) - m2.get(k, 0)) for k in keys), default=0.0)
    return {"quadratic": q_res, "martingale": m_res, "total": max(q_res, m_res),
            "pi_r_scale": pi_r.max_abs() * dt}


# --------------------------------------------------------------------------
# Heisenberg flow


def _template_noise(params: RwaParams, step: int = 0) -> dict:
    return composite_increments(params.kappa, params.nu, step)


def langevin_increments(params: RwaParams, step: int = 0, noise: bool = True) -> dict:
    """Right-hand sides of the four flow equations over Schroedinger labels."""
    ops = {k: LinearOp.of(k) for k in FLOW_LABELS}
    p = params
    dt = p.grid.dt
    w = _template_noise(p, step)
    a, ad, at, atd = ops["a"], ops["adag"], ops["atil"], ops["atildag"]
    da = (a * (-1j * p.omega - p.kappa) - (atd - a) * (2 * (1 - p.lam) * p.nu * p.kappa)) * dt
    dad = (ad * (1j * p.omega - p.kappa) + (ad - at) * (2 * (1 - p.lam) * p.mu * p.kappa)) * dt
    if noise:
        da = da + w["dW"] - w["dWctil"] * (p.lam * p.nu)
        dad = dad + w["dWtil"] + w["dWc"] * (p.lam * p.mu)
    out = {"a": da, "adag": dad}
    out["atil"] = tilde_conjugate(da)
    out["atildag"] = tilde_conjugate(dad)
    return out


def langevin_matrices(params: RwaParams, noise: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """(drift, injection) read off the model Langevin equations as stated."""
    incs = langevin_increments(params, noise=noise)
    return generator_matrices(FLOW_LABELS, RWA_NOISE, incs, params.grid.dt)


def ito_formula_matrices(params: RwaParams) -> tuple[np.ndarray, np.ndarray]:
    """(drift, injection) from the quantum Ito formula applied to each label.

    Independent of the stated Langevin equations: built from H_S, Pi and
    the lambda-martingale only.
    """
    tables = params.tables
    pi_r, pi_d = build_pi_rwa(params)
    dM = build_martingale_rwa(params.lam, 0, params)[2]
    H = hamiltonian_rwa(params)
    incs = {k: ito_increment(LinearOp.of(k), H, pi_r + pi_d, dM, tables) for k in FLOW_LABELS}
    return generator_matrices(FLOW_LABELS, RWA_NOISE, incs, params.grid.dt)


class HeisenbergFlow(LinearFlow):
    """a(t), adag(t), a~(t), a~dag(t) under the RWA Langevin equations."""

    def __init__(self, params: RwaParams, *, noise: bool = True, track: bool = True):
        drift, inj = langevin_matrices(params, noise=noise)
        super().__init__(FLOW_LABELS, RWA_NOISE, drift, inj, params.grid, params.tables,
                         track=track)
        self.params = params
        self.noise = noise

    def ops(self) -> dict:
        return {k: self.op(k) for k in FLOW_LABELS}


def step_rwa(flow: HeisenbergFlow) -> HeisenbergFlow:
    flow.advance()
    return flow


def heisenberg_increments(flow: HeisenbergFlow, lam: float | None = None,
                          nu: float | None = None) -> dict:
    """Output-field increments dB(t), dBdag(t), dW(t), dW+o(t) and tildes."""
    p = flow.params
    lam = p.lam if lam is None else lam
    nu = p.nu if nu is None else nu
    mu = 1.0 - nu
    g = sqrt(2.0 * p.kappa)
    dt = p.grid.dt
    j = flow.step_index
    ops = flow.ops()
    dB_in = {k: LinearOp.of(NoiseLabel(k, j)) for k in RWA_NOISE}
    dB = dB_in["dB"] + ((ops["atildag"] - ops["a"]) * ((1 - lam) * nu) - ops["a"] * lam) * (g * dt)
    dBd = dB_in["dBdag"] - ((ops["adag"] - ops["atil"]) * ((1 - lam) * mu)
                            + ops["adag"] * lam) * (g * dt)
    dBt, dBdt = tilde_conjugate(dB), tilde_conjugate(dBd)
    dW = (dB * mu + dBdt * nu) * g
    dWc = (dBd - dBt) * g
    return {"dB": dB, "dBdag": dBd, "dBtil": dBt, "dBtildag": dBdt,
            "dW": dW, "dWtil": tilde_conjugate(dW), "dWc": dWc, "dWctil": tilde_conjugate(dWc)}


def _langevin_forms(flow: HeisenbergFlow, A: LinearOp, lam: float) -> tuple[LinearOp, LinearOp]:
    """Input-field and output-field Langevin increments of A(t)."""
    p = flow.params
    dt = p.grid.dt
    tables = p.tables
    ops = flow.ops()
    g = build_gamma(p, ops)
    comm = {k: commutator_linear(v, A, tables) for k, v in g.items()}
    hs = (ops["adag"] * commutator_linear(ops["a"], A, tables)
          + ops["a"] * commutator_linear(ops["adag"], A, tables)
          - ops["atildag"] * commutator_linear(ops["atil"], A, tables)
          - ops["atil"] * commutator_linear(ops["atildag"], A, tables)) * (1j * p.omega * dt)
    left = g["gamma_c"] * comm["gamma_nu"] + g["gamma_c_til"] * comm["gamma_nu_til"]
    right = g["gamma_nu"] * comm["gamma_c"] + g["gamma_nu_til"] * comm["gamma_c_til"]
    # [gamma~+o, [gamma+o, A]] vanishes: the inner commutator is a c-number
    w_in = _template_noise(p, flow.step_index)
    w_out = heisenberg_increments(flow, lam)

    def noise_terms(w):
        return (-(w["dW"] * comm["gamma_c"] + w["dWtil"] * comm["gamma_c_til"])
                + (w["dWc"] * comm["gamma_nu"] + w["dWctil"] * comm["gamma_nu_til"]) * lam)

    k = p.kappa * dt
    d_in = hs + (left * (1 - 2 * lam) + right) * k + noise_terms(w_in)
    d_out = hs + (left + right * (1 - 2 * lam)) * k + noise_terms(w_out)
    return d_in, d_out


def input_output_consistency(flow: HeisenbergFlow, lam: float | None = None) -> dict:
    """Residual between input- and output-field Langevin forms at the current step."""
    lam = flow.params.lam if lam is None else lam
    res = {}
    step_res = {}
    for name in ("a", "adag"):
        A = flow.op(name)
        d_in, d_out = _langevin_forms(flow, A, lam)
        res[name] = d_in.residual(d_out)
        step_res[name] = d_in
    return {"residual": max(res.values()), "per_operator": res, "input_form": step_res}


def input_output_trace(params: RwaParams, n_check: int | None = None) -> np.ndarray:
    """Per-step input/output residuals over the first ``n_check`` steps."""
    flow = HeisenbergFlow(params)
    n = params.grid.n_steps if n_check is None else min(n_check, params.grid.n_steps)
    out = np.empty(n)
    for j in range(n):
        out[j] = input_output_consistency(flow)["residual"]
        flow.advance()
    return out


# --------------------------------------------------------------------------
# commutator trace and the decay/restoration experiment


@dataclass
class CcrTrace:
    times: np.ndarray
    values: np.ndarray
    analytic: np.ndarray   # e^{-2 kappa t}, the noise-free closed form

    @property
    def final(self) -> complex:
        return complex(self.values[-1])


def ccr_trace(params: RwaParams, noise: bool = True) -> CcrTrace:
    """c(t_j) = [a(t_j), adag(t_j)] over the full grid."""
    flow = HeisenbergFlow(params, noise=noise, track=False)
    n = params.grid.n_steps
    vals = np.empty(n + 1, dtype=complex)
    vals[0] = flow.commutator("a", "adag")
    for j in range(n):
        flow.advance()
        vals[j + 1] = flow.commutator("a", "adag")
    t = params.grid.times
    return CcrTrace(t, vals, np.exp(-2 * params.kappa * t))


def decay_restoration(kappa: float = 0.5, omega: float = 1.0, dt: float = 1e-4,
                      t_max: float = 1.0) -> dict:
    """Noise-deleted and noise-included lambda = 1 flows side by side."""
    params = RwaParams(omega=omega, kappa=kappa, lam=1.0, grid=TimeGrid.from_t_max(dt, t_max))
    off = ccr_trace(params, noise=False)
    on = ccr_trace(params, noise=True)
    return {"decay": off, "restore": on}


def restoration_gap_sum(params: RwaParams) -> np.ndarray:
    """sum_j 2 kappa dt e^{-2 kappa (t - t_j)}: the continuum noise-pair contribution."""
    t = params.grid.times
    dt = params.grid.dt
    out = np.empty_like(t)
    for n, tn in enumerate(t):
        tj = t[:n]
        out[n] = np.sum(2 * params.kappa * dt * np.exp(-2 * params.kappa * (tn - tj)))
    return out


# --------------------------------------------------------------------------
# lambda independence of the bra-projected dynamics


def lambda_invariance_of_bra_dynamics(lams, params: RwaParams) -> dict:
    """Run one flow per lambda; compare bra-projected a(t), adag(t) step by step.

    Also checks the projected recursion
    <<1|a(t+dt) = (1 + (-i w - k) dt) <<1|a(t) + sqrt(2k) <<1|dB_t
    (and its adag partner) termwise.
    """
    lams = list(lams)
    if len(lams) < 1:
        raise ValueError("need at least one lambda")
    flows = [HeisenbergFlow(params.with_(lam=float(l))) for l in lams]
    n = params.grid.n_steps
    dev = np.zeros(n + 1)
    rec = np.zeros(n)
    dt = params.grid.dt
    g = sqrt(2.0 * params.kappa)
    phase = {"a": 1 + (-1j * params.omega - params.kappa) * dt,
             "adag": 1 + (1j * params.omega - params.kappa) * dt}
    # projected noise kinds are ("dBdag", "dB")
    kinds = flows[0].projected_labels()[1]
    inject = {"a": kinds.index("dB"), "adag": kinds.index("dBdag")}
    prev = None
    for j in range(n + 1):
        cur = {name: flows[0].projected(name) for name in ("a", "adag")}
        for f in flows[1:]:
            for name in ("a", "adag"):
                s, z = f.projected(name)
                d = max(np.abs(s - cur[name][0]).max(),
                        np.abs(z - cur[name][1]).max() if z.size else 0.0)
                dev[j] = max(dev[j], d)
        if prev is not None:
            for name in ("a", "adag"):
                s0, z0 = prev[name]
                s1, z1 = cur[name]
                want_z = np.zeros_like(z1)
                want_z[:-1] = z0 * phase[name]
                want_z[-1, inject[name]] = g
                r = max(np.abs(s1 - s0 * phase[name]).max(), np.abs(z1 - want_z).max())
                rec[j - 1] = max(rec[j - 1], r)
        prev = cur
        if j < n:
            for f in flows:
                f.advance()
    return {"max_deviation": float(dev.max()), "per_step": dev,
            "recursion_residual": float(rec.max()) if n else 0.0, "recursion_per_step": rec}


def bra_conservation(params: RwaParams) -> float:
    """Largest bra-projected coefficient of the gamma+o factors of Pi_R, Pi_D."""
    g = build_gamma(params)
    return max(bra_project(g["gamma_c"]).max_abs(), bra_project(g["gamma_c_til"]).max_abs())


def martingale_display_residuals(params: RwaParams, step: int = 0) -> dict:
    """Compare dM with the closed forms stated for lambda = 1 and lambda = 0.

    lambda = 1: i sqrt(2k) [(adag dB - dBdag a) + t.c.]
    lambda = 0: i sqrt(2k) [(adag - a~) dB~dag + t.c.]

    The lambda = 0 form is exact only for nu = 1; for other nu the two agree
    once the noise is bra-projected.
    """
    g = sqrt(2.0 * params.kappa)
    lab = {k: LinearOp.of(NoiseLabel(k, step)) for k in RWA_NOISE}
    o = {k: LinearOp.of(k) for k in FLOW_LABELS}
    y1 = mixed(o["adag"], lab["dB"]) - mixed(o["a"], lab["dBdag"], side="left")
    y0 = mixed(o["adag"] - o["atil"], lab["dBtildag"])
    out = {}
    for lam, y in ((1.0, y1), (0.0, y0)):
        want = (y + tilde_conjugate(y)) * (1j * g)
        have = build_martingale_rwa(lam, step, params)[2]
        m1, m2 = have.merged_sides(), want.merged_sides()
        keys = set(m1) | set(m2)
        exact = max((abs(m1.get(k, 0) - m2.get(k, 0)) for k in keys), default=0.0)
        p1, p2 = have.noise_projected().merged_sides(), want.noise_projected().merged_sides()
        keys = set(p1) | set(p2)
        proj = max((abs(p1.get(k, 0) - p2.get(k, 0)) for k in keys), default=0.0)
        out[f"lambda{int(lam)}_exact"] = exact
        out[f"lambda{int(lam)}_projected"] = proj
    return out
