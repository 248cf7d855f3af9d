"""Time grid, noise-increment algebra and Ito/Stratonovich assembly.

Increments are discretized one label per grid step; every weak relation
is a pair expectation proportional to ``dt`` with support on equal steps
only.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .labels import RWA_NOISE, TILDE, XX_NOISE, NoiseLabel, model_of
from .op_expansion import (
    LinearOp,
    MixedBilinearOp,
    QuadraticOp,
    multiply_contract,
    tilde_conjugate,
)


class InvalidInputError(ValueError):
    pass


class InvalidParameterError(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    dt: float
    n_steps: int

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameterError("dt must be positive")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InvalidParameterError("n_steps must be a positive integer")

    @classmethod
    def from_t_max(cls, dt: float, t_max: float) -> "TimeGrid":
        return cls(dt, max(1, int(round(t_max / dt))))

    @property
    def t_max(self) -> float:
        return self.n_steps * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


# weak relations in units of dt; the stated ones plus their tilde conjugates
_RWA_MOMENTS = {
    ("dBdag", "dB"): (1.0, 0.0),          # nbar
    ("dB", "dBdag"): (1.0, 1.0),          # nbar + 1
    ("dBtil", "dB"): (1.0, 0.0),
    ("dBtildag", "dBdag"): (1.0, 1.0),
}
_XX_MOMENTS = {("dX", "dX"): (1.0, 0.5), ("dX", "dXtil"): (1.0, 0.5)}


def _close_under_tilde(table: dict) -> dict:
    out = dict(table)
    for (x, y), v in table.items():
        # tilde conjugation maps <|x y|> onto <|x~ y~|>, values are real here
        out[(TILDE[x], TILDE[y])] = v
    return out


_RWA_MOMENTS = _close_under_tilde(_RWA_MOMENTS)
_XX_MOMENTS = _close_under_tilde(_XX_MOMENTS)


@dataclass(frozen=True)
class NoiseTables:
    """Commutator and vacuum pair-moment tables for one model's increments.

    The dX~ rules are not given for the x-X model; they follow from the
    stated ones by tilde conjugation.
    """

    nbar: float
    dt: float
    model: str = "rwa"

    def __post_init__(self):
        if self.nbar < 0:
            raise InvalidParameterError("nbar must be non-negative")
        if not self.dt > 0:
            raise InvalidParameterError("dt must be positive")
        if self.model not in ("rwa", "xx"):
            raise InvalidParameterError(f"unknown model {self.model!r}")

    @property
    def kinds(self) -> tuple:
        return RWA_NOISE if self.model == "rwa" else XX_NOISE

    def _check(self, x: NoiseLabel, y: NoiseLabel):
        for lab in (x, y):
            if not isinstance(lab, NoiseLabel):
                raise InvalidInputError(f"{lab!r} is not a noise label")
            if model_of(lab) != self.model:
                raise InvalidInputError(f"{lab!r} is not a {self.model} increment")

    def _kind_moment(self, kx: str, ky: str) -> float:
        table = _RWA_MOMENTS if self.model == "rwa" else _XX_MOMENTS
        if (kx, ky) not in table:
            return 0.0
        a, b = table[(kx, ky)]
        return (a * self.nbar + b) * self.dt

    def moment(self, x: NoiseLabel, y: NoiseLabel) -> complex:
        self._check(x, y)
        if x.step != y.step:
            return 0.0
        return self._kind_moment(x.kind, y.kind)

    def commutator(self, x: NoiseLabel, y: NoiseLabel) -> complex:
        return self.moment(x, y) - self.moment(y, x)

    def mean(self, x: NoiseLabel) -> complex:
        self._check(x, x)
        return 0.0

    @property
    def moment_table(self) -> dict:
        return {(a, b): self._kind_moment(a, b) for a in self.kinds for b in self.kinds}

    @property
    def commutator_table(self) -> dict:
        m = self.moment_table
        return {(a, b): m[(a, b)] - m[(b, a)] for a in self.kinds for b in self.kinds}


def noise_moment(x: NoiseLabel, y: NoiseLabel, tables: NoiseTables) -> complex:
    return tables.moment(x, y)


def noise_commutator(x: NoiseLabel, y: NoiseLabel, tables: NoiseTables) -> complex:
    return tables.commutator(x, y)


# --------------------------------------------------------------------------
# composite increments


def check_ordering(nu: float, mu: float | None = None) -> float:
    """Return mu = 1 - nu, rejecting an explicit mu that breaks mu + nu = 1."""
    if mu is not None and abs(mu + nu - 1.0) > 1e-12:
        raise InvalidParameterError(f"mu + nu must equal 1, got {mu} + {nu}")
    return 1.0 - nu


def composite_increments(kappa: float, nu: float, step: int, mu: float | None = None) -> dict:
    """dW, dW~, dW+o, dW~+o at ``step`` as LinearOps over dB-labels."""
    mu = check_ordering(nu, mu)
    g = sqrt(2.0 * kappa)
    B = {k: NoiseLabel(k, step) for k in RWA_NOISE}
    dW = LinearOp.combo([(g * mu, B["dB"]), (g * nu, B["dBtildag"])])
    dWc = LinearOp.combo([(g, B["dBdag"]), (-g, B["dBtil"])])
    return {"dW": dW, "dWtil": tilde_conjugate(dW), "dWc": dWc, "dWctil": tilde_conjugate(dWc)}


def _contract_linear(x: LinearOp, y: LinearOp, tables: NoiseTables) -> complex:
    return sum(cx * cy * tables.moment(kx, ky)
               for kx, cx in x.terms.items() for ky, cy in y.terms.items())


def compose_dW_moments(params, tables: NoiseTables, step: int = 0) -> dict:
    """All 16 ordered pair expectations of the composite RWA increments.

    ``params`` needs ``kappa`` and ``nu`` (and optionally ``mu``).
    """
    incs = composite_increments(params.kappa, params.nu, step, getattr(params, "mu", None))
    return {(p, q): _contract_linear(incs[p], incs[q], tables) for p in incs for q in incs}


# --------------------------------------------------------------------------
# thermal Bogoliubov transformation


def bogoliubov_matrix(nbar: float) -> np.ndarray:
    return np.array([[1.0 + nbar, -nbar], [-1.0, 1.0]])


def bogoliubov_checks(nbar: float, dt: float = 1e-3, step: int = 0) -> dict:
    """Determinant and new-vacuum annihilation checks for dC = B dB.

    The thermal doublets are dB^mu = (dB, dB~dag) and
    dBbar^mu = (dBdag, -dB~).  The transformed pair is
    dC^mu = B^{mu nu} dB^nu and dCbar^mu = dBbar^nu (B^-1)^{nu mu};
    dC^1 = dC, dC^2 = dC~dag, dCbar^1 = dCdag, dCbar^2 = -dC~.
    """
    if nbar < 0:
        raise InvalidParameterError("nbar must be non-negative")
    tables = NoiseTables(nbar, dt, "rwa")
    Bm = bogoliubov_matrix(nbar)
    Binv = np.linalg.inv(Bm)
    lab = {k: NoiseLabel(k, step) for k in RWA_NOISE}
    doublet = [LinearOp.of(lab["dB"]), LinearOp.of(lab["dBtildag"])]
    bar = [LinearOp.of(lab["dBdag"]), LinearOp.of(lab["dBtil"], -1.0)]
    dC = [doublet[0] * Bm[m, 0] + doublet[1] * Bm[m, 1] for m in range(2)]
    dCbar = [bar[0] * Binv[0, m] + bar[1] * Binv[1, m] for m in range(2)]
    new = {"dC": dC[0], "dCtildag": dC[1], "dCdag": dCbar[0], "dCtil": dCbar[1] * -1.0}
    base = {k: LinearOp.of(v) for k, v in lab.items()}
    ket = {}     # <| Y dC |> = 0 : dC and dC~ annihilate |>
    bra = {}     # <| dC^dag Y |> = 0 : dCdag and dC~dag annihilate <|
    for y_name, y in base.items():
        for c_name in ("dC", "dCtil"):
            ket[(y_name, c_name)] = _contract_linear(y, new[c_name], tables)
        for c_name in ("dCdag", "dCtildag"):
            bra[(c_name, y_name)] = _contract_linear(new[c_name], y, tables)
    comm = {}
    for mu_ in range(2):
        for nu_ in range(2):
            x, y = dC[mu_], dCbar[nu_]
            comm[(mu_, nu_)] = _contract_linear(x, y, tables) - _contract_linear(y, x, tables)
    return {
        "det": float(np.linalg.det(Bm)),
        "ket_annihilation": ket,
        "bra_annihilation": bra,
        "doublet_commutators": comm,
        "increments": new,
        "max_violation": max(abs(v) for v in list(ket.values()) + list(bra.values())),
    }


# --------------------------------------------------------------------------
# Ito <-> Stratonovich hat-Hamiltonians


@dataclass(frozen=True)
class HatHamiltonian:
    """H_S dt + i * damping + martingale.

    ``damping`` already includes the factor dt: Pi dt for the Ito form and
    Pi dt + dM dM / 2 for the Stratonovich form.
    """

    hamiltonian: QuadraticOp
    damping: QuadraticOp
    martingale: MixedBilinearOp
    dt: float

    def decompose(self, Pi_R: QuadraticOp, Pi_D: QuadraticOp) -> tuple[complex, complex, float]:
        """Least-squares coefficients (r, d) with damping ~ (r Pi_R + d Pi_D) dt."""
        keys = list(dict.fromkeys(self.damping.support() + Pi_R.support() + Pi_D.support()))
        A = np.column_stack([Pi_R.coefficient_vector(keys), Pi_D.coefficient_vector(keys)])
        b = self.damping.coefficient_vector(keys) / self.dt
        cols = [j for j in range(2) if np.abs(A[:, j]).max() > 0]
        coef = np.zeros(2, dtype=complex)
        if cols:
            sol = np.linalg.lstsq(A[:, cols], b, rcond=None)[0]
            coef[cols] = sol
        resid = float(np.abs(A @ coef - b).max()) if len(b) else 0.0
        return complex(coef[0]), complex(coef[1]), resid


def martingale_square(dM: MixedBilinearOp, tables: NoiseTables) -> QuadraticOp:
    return multiply_contract(dM, dM, tables)


def ito_hat_hamiltonian(H_S: QuadraticOp, Pi_R: QuadraticOp, Pi_D: QuadraticOp,
                        dM: MixedBilinearOp, tables: NoiseTables) -> HatHamiltonian:
    dt = tables.dt
    return HatHamiltonian(H_S * dt, (Pi_R + Pi_D) * dt, dM, dt)


def ito_to_stratonovich_hamiltonian(H_S: QuadraticOp, Pi_R: QuadraticOp, Pi_D: QuadraticOp,
                                    dM: MixedBilinearOp, tables: NoiseTables) -> HatHamiltonian:
    """Stratonovich generator H_S dt + i(Pi dt + dM dM / 2) + dM."""
    dt = tables.dt
    damping = (Pi_R + Pi_D) * dt + martingale_square(dM, tables) * 0.5
    return HatHamiltonian(H_S * dt, damping, dM, dt)


def hat_hamiltonian_minus(H_S: QuadraticOp, Pi_R: QuadraticOp, Pi_D: QuadraticOp,
                          dM: MixedBilinearOp, tables: NoiseTables) -> HatHamiltonian:
    """Generator of the inverse evolution: Ito form plus i dM dM."""
    dt = tables.dt
    damping = (Pi_R + Pi_D) * dt + martingale_square(dM, tables)
    return HatHamiltonian(H_S * dt, damping, dM, dt)


__all__ = [
    "InvalidInputError", "InvalidParameterError", "TimeGrid", "NoiseLabel", "NoiseTables",
    "noise_moment", "noise_commutator", "composite_increments", "compose_dW_moments",
    "bogoliubov_matrix", "bogoliubov_checks", "HatHamiltonian", "martingale_square",
    "ito_hat_hamiltonian", "ito_to_stratonovich_hamiltonian", "hat_hamiltonian_minus",
    "check_ordering",
]
