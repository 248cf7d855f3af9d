"""Oscillator coupled through its position to a commutative random force.

The flow runs over the x-alphabet (x, p, x~, p~).  The model Langevin
equations are used as written, including the imaginary drift
4 i k m w (nbar + 1/2)(x - x~) in dp; that term cancels against the Ito
correction in the generic quantum Ito formula, so the two routes differ by
exactly that term (see ``ito_formula_discrepancy``).  Both vanish under
bra-projection.

Note on signs: the +k(x - x~) drift in dx makes the unprojected x-flow
formally anti-damped, while the projected x-flow carries no k term.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import sqrt

import numpy as np

from .ito_core import (
    NoiseTables,
    TimeGrid,
    hat_hamiltonian_minus,
    ito_to_stratonovich_hamiltonian,
)
from .labels import XX_NOISE, NoiseLabel
from .op_expansion import (
    LinearFlow,
    LinearOp,
    MixedBilinearOp,
    QuadraticOp,
    bilinear_commutator,
    bra_project,
    generator_matrices,
    ito_increment,
    martingale_vacuum_check,
    mixed,
    multiply_contract,
    product,
    tilde_conjugate,
)

FLOW_LABELS = ("x", "p", "xtil", "ptil")


@dataclass(frozen=True)
class XxParams:
    m: float = 1.0
    omega: float = 1.0
    kappa: float = 0.5
    nbar: float = 0.0
    grid: TimeGrid = field(default_factory=lambda: TimeGrid(1e-3, 1000))

    def __post_init__(self):
        if not (self.m > 0 and self.omega > 0):
            raise ValueError("m and omega must be positive")
        if not self.kappa >= 0:
            raise ValueError("kappa must be non-negative")
        if self.nbar < 0:
            raise ValueError("nbar must be non-negative")

    @property
    def tables(self) -> NoiseTables:
        return NoiseTables(self.nbar, self.grid.dt, "xx")

    @property
    def x_scale(self) -> float:
        """x = s (a + adag)."""
        return sqrt(1.0 / (2.0 * self.m * self.omega))

    @property
    def p_scale(self) -> float:
        """p = -i r (a - adag)."""
        return sqrt(self.m * self.omega / 2.0)

    @property
    def noise_scale(self) -> float:
        return 2.0 * sqrt(self.kappa * self.m * self.omega)

    @classmethod
    def from_temperature(cls, omega: float, T: float, **kw) -> "XxParams":
        from .kinetics import planck_nbar

        return cls(omega=omega, nbar=planck_nbar(omega, T), **kw)

    def with_(self, **kw) -> "XxParams":
        return replace(self, **kw)


def _ops() -> dict:
    return {k: LinearOp.of(k) for k in FLOW_LABELS}


def hamiltonian_xx(params: XxParams) -> QuadraticOp:
    """H_S - H~_S with H_S = p^2/(2m) + m w^2 x^2 / 2."""
    o = _ops()
    h = product(o["p"], o["p"]) * (0.5 / params.m) \
        + product(o["x"], o["x"]) * (0.5 * params.m * params.omega ** 2)
    ht = product(o["ptil"], o["ptil"]) * (0.5 / params.m) \
        + product(o["xtil"], o["xtil"]) * (0.5 * params.m * params.omega ** 2)
    return h - ht


def build_pi_xx(params: XxParams) -> tuple[QuadraticOp, QuadraticOp]:
    o = _ops()
    y = o["x"] - o["xtil"]
    pi_r = product(y, o["p"] + o["ptil"]) * (-1j * params.kappa)
    pi_d = product(y, y) * (-2.0 * params.kappa * params.m * params.omega * (params.nbar + 0.5))
    return pi_r, pi_d


def build_martingale_xx(step: int, params: XxParams) -> MixedBilinearOp:
    dX = LinearOp.of(NoiseLabel("dX", step))
    dXt = LinearOp.of(NoiseLabel("dXtil", step))
    o = _ops()
    return (mixed(o["x"], dX) - mixed(o["xtil"], dXt)) * params.noise_scale


def martingale_report(params: XxParams, steps=(0, 1)) -> dict:
    """FD theorem, vacuum mean, tildian property and commutativity residuals."""
    tables = params.tables
    dt = tables.dt
    _, pi_d = build_pi_xx(params)
    ms = [build_martingale_xx(j, params) for j in steps]
    dM = ms[0]
    fd = (multiply_contract(dM, dM, tables) + pi_d * (2 * dt)).max_abs()
    idM = dM * 1j
    tildian = idM.residual(tilde_conjugate(idM))
    comm = max(bilinear_commutator(a, b, tables).max_abs() for a in ms for b in ms)
    return {
        "fluctuation_dissipation": fd,
        "vacuum_mean": abs(martingale_vacuum_check(dM, tables)),
        "tildian": tildian,
        "commutativity": comm,
    }


def stratonovich_report(params: XxParams) -> dict:
    """Pi_D coefficient of the Stratonovich and inverse-evolution assemblies."""
    tables = params.tables
    pi_r, pi_d = build_pi_xx(params)
    dM = build_martingale_xx(0, params)
    H = hamiltonian_xx(params)
    r, d, resid = ito_to_stratonovich_hamiltonian(H, pi_r, pi_d, dM, tables).decompose(pi_r, pi_d)
    r_m, d_m, resid_m = hat_hamiltonian_minus(H, pi_r, pi_d, dM, tables).decompose(pi_r, pi_d)
    return {
        "stratonovich_pi_r": r, "stratonovich_pi_d": d, "stratonovich_residual": resid,
        "minus_pi_r": r_m, "minus_pi_d": d_m, "minus_residual": resid_m,
    }


# --------------------------------------------------------------------------
# Heisenberg flow


def langevin_increments(params: XxParams, step: int = 0, noise: bool = True) -> dict:
    o = _ops()
    p = params
    dt = p.grid.dt
    y = o["x"] - o["xtil"]
    dx = (o["p"] * (1.0 / p.m) + y * p.kappa) * dt
    dp = (o["x"] * (-p.m * p.omega ** 2) - (o["p"] + o["ptil"]) * p.kappa
          + y * (4j * p.kappa * p.m * p.omega * (p.nbar + 0.5))) * dt
    if noise:
        dp = dp - LinearOp.of(NoiseLabel("dX", step), p.noise_scale)
    return {"x": dx, "p": dp, "xtil": tilde_conjugate(dx), "ptil": tilde_conjugate(dp)}


def langevin_matrices(params: XxParams, noise: bool = True):
    return generator_matrices(FLOW_LABELS, XX_NOISE, langevin_increments(params, noise=noise),
                              params.grid.dt)


def ito_formula_matrices(params: XxParams):
    tables = params.tables
    pi_r, pi_d = build_pi_xx(params)
    dM = build_martingale_xx(0, params)
    H = hamiltonian_xx(params)
    incs = {k: ito_increment(LinearOp.of(k), H, pi_r + pi_d, dM, tables) for k in FLOW_LABELS}
    return generator_matrices(FLOW_LABELS, XX_NOISE, incs, params.grid.dt)


def ito_formula_discrepancy(params: XxParams) -> dict:
    """Stated drift minus generic-Ito drift, and the term it should equal."""
    D1, N1 = langevin_matrices(params)
    D2, N2 = ito_formula_matrices(params)
    diff = D1 - D2
    expected = np.zeros_like(diff)
    c = 4j * params.kappa * params.m * params.omega * (params.nbar + 0.5)
    i = {k: n for n, k in enumerate(FLOW_LABELS)}
    expected[i["p"], i["x"]], expected[i["p"], i["xtil"]] = c, -c
    expected[i["ptil"], i["xtil"]], expected[i["ptil"], i["x"]] = np.conj(c), -np.conj(c)
    return {
        "drift_difference": diff,
        "unexplained": float(np.abs(diff - expected).max()),
        "injection_difference": float(np.abs(N1 - N2).max()),
        "imaginary_term": c,
    }


class XxFlow(LinearFlow):
    def __init__(self, params: XxParams, *, noise: bool = True, track: bool = True):
        drift, inj = langevin_matrices(params, noise=noise)
        super().__init__(FLOW_LABELS, XX_NOISE, drift, inj, params.grid, params.tables,
                         track=track)
        self.params = params


def step_xx(flow: XxFlow) -> XxFlow:
    flow.advance()
    return flow


def xp_ccr_trace(params: XxParams) -> np.ndarray:
    """[x(t_j), p(t_j)] over the grid."""
    flow = XxFlow(params, track=False)
    out = np.empty(params.grid.n_steps + 1, dtype=complex)
    out[0] = flow.commutator("x", "p")
    for j in range(params.grid.n_steps):
        flow.advance()
        out[j + 1] = flow.commutator("x", "p")
    return out


# --------------------------------------------------------------------------
# bra-projected Kramers equations


@dataclass
class KramersResult:
    times: np.ndarray
    x_residual: np.ndarray
    p_residual: np.ndarray
    a_residual: np.ndarray
    mean_x_coeff: np.ndarray   # projected coefficient of the initial x label
    mean_p_coeff: np.ndarray

    @property
    def max_residual(self) -> float:
        parts = [self.x_residual, self.p_residual, self.a_residual]
        return float(max(np.abs(r).max() if r.size else 0.0 for r in parts))


def _to_a_basis(sys_xp: np.ndarray, noise_dx: np.ndarray, params: XxParams):
    """Rewrite (x, p) / dX coefficients over (a, adag) / (dB, dBdag).

    dX corresponds to (dB + dBdag)/sqrt(2), which reproduces the dX moments.
    """
    s, r = params.x_scale, params.p_scale
    cx, cp = sys_xp
    sys_a = np.array([s * cx - 1j * r * cp, s * cx + 1j * r * cp])
    nz = noise_dx[:, 0] / sqrt(2.0)
    return sys_a, np.column_stack([nz, nz])


def bra_kramers(params: XxParams) -> KramersResult:
    """Check the projected recursions termwise at every step.

    dx = p/m dt
    dp = -m w^2 x dt - 2 k p dt - 2 sqrt(k m w) dX
    da = -i w a dt - k (a - adag) dt - i sqrt(k) (dB + dBdag)
    """
    flow = XxFlow(params)
    p = params
    dt = p.grid.dt
    n = p.grid.n_steps
    sys_labels, kinds = flow.projected_labels()
    assert sys_labels == ("x", "p") and kinds == ("dX",)
    xr, pr, ar = np.zeros(n), np.zeros(n), np.zeros(n)
    mx, mp = np.empty(n + 1, dtype=complex), np.empty(n + 1, dtype=complex)
    g = p.noise_scale
    prev = None
    for j in range(n + 1):
        cur = {k: flow.projected(k) for k in ("x", "p")}
        mx[j], mp[j] = cur["x"][0][0], cur["p"][0][0]
        if prev is not None:
            (sx, zx), (sp, zp) = prev["x"], prev["p"]
            want_x = (sx + sp * (dt / p.m), np.vstack([zx + zp * (dt / p.m), [[0.0]]]))
            ps = sp * (1 - 2 * p.kappa * dt) - sx * (p.m * p.omega ** 2 * dt)
            pz = zp * (1 - 2 * p.kappa * dt) - zx * (p.m * p.omega ** 2 * dt)
            want_p = (ps, np.vstack([pz, [[-g]]]))
            xr[j - 1] = max(np.abs(cur["x"][0] - want_x[0]).max(),
                            np.abs(cur["x"][1] - want_x[1]).max())
            pr[j - 1] = max(np.abs(cur["p"][0] - want_p[0]).max(),
                            np.abs(cur["p"][1] - want_p[1]).max())
            ar[j - 1] = _a_form_residual(prev, cur, p)
        prev = cur
        if j < n:
            flow.advance()
    return KramersResult(p.grid.times, xr, pr, ar, mx, mp)


def _a_operator(proj: dict, params: XxParams, sign: float):
    """Projected a (sign=+1) or adag (sign=-1) from projected x, p."""
    s, r = params.x_scale, params.p_scale
    (sx, zx), (sp, zp) = proj["x"], proj["p"]
    sys = sx / (2 * s) + sign * 1j * sp / (2 * r)
    noise = zx / (2 * s) + sign * 1j * zp / (2 * r)
    return _to_a_basis(sys, noise, params)


def _a_form_residual(prev: dict, cur: dict, params: XxParams) -> float:
    dt = params.grid.dt
    a0s, a0n = _a_operator(prev, params, +1)
    d0s, d0n = _a_operator(prev, params, -1)
    a1s, a1n = _a_operator(cur, params, +1)
    want_s = a0s + (-1j * params.omega * a0s - params.kappa * (a0s - d0s)) * dt
    want_n = a0n + (-1j * params.omega * a0n - params.kappa * (a0n - d0n)) * dt
    inj = -1j * sqrt(params.kappa)
    want_n = np.vstack([want_n, [[inj, inj]]])
    return float(max(np.abs(a1s - want_s).max(), np.abs(a1n - want_n).max()))


def projected_a_noise_coefficients(params: XxParams) -> dict:
    """Noise coefficients of the one-step projected a-equation."""
    flow = XxFlow(params.with_(grid=TimeGrid(params.grid.dt, 1)))
    flow.advance()
    proj = {k: flow.projected(k) for k in ("x", "p")}
    _, noise = _a_operator(proj, params, +1)
    return {"dB": complex(noise[-1, 0]), "dBdag": complex(noise[-1, 1])}


def rwa_coefficient_comparison(params: XxParams) -> dict:
    """Compare the projected a-equation noise with the RWA model's sqrt(2k) dB."""
    from .rwa_model import HeisenbergFlow, RwaParams

    xx = projected_a_noise_coefficients(params)
    rp = RwaParams(omega=params.omega, kappa=params.kappa, nbar=params.nbar,
                   grid=TimeGrid(params.grid.dt, 1))
    rf = HeisenbergFlow(rp)
    rf.advance()
    _, kinds = rf.projected_labels()
    z = rf.projected("a")[1][-1]
    rwa = {k: complex(z[kinds.index(k)]) for k in ("dB", "dBdag")}
    mag_xx, mag_rwa = abs(xx["dB"]), abs(rwa["dB"])
    return {
        "xx_noise": xx,
        "rwa_noise": rwa,
        "ratio": mag_xx / mag_rwa if mag_rwa else float("nan"),
        "xx_couples_to_dBdag": abs(xx["dBdag"]) > 0,
        "rwa_couples_to_dBdag": abs(rwa["dBdag"]) > 0,
    }


def bra_projects_pi(params: XxParams) -> float:
    """x - x~ projects to zero, so both damping parts vanish under the bra vacuum."""
    o = _ops()
    return bra_project(o["x"] - o["xtil"]).max_abs()
