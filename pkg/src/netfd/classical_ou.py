"""Classical Ornstein-Uhlenbeck velocity process.

Euler-Maruyama trajectories of du = -g u dt + dR/m with <dR dR> = 2 m g T dt,
the closed-form Fokker-Planck moments, and Monte-Carlo estimates.  The noise
is additive, so Ito and Stratonovich readings of the update coincide.

Trajectories are simulated in fixed-size chunks; chunk ``c`` draws from
``PCG64(SeedSequence(seed, spawn_key=(c,)))``, so results depend only on
(seed, n_traj, chunk size), never on execution order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, sqrt

import numpy as np

from .ito_core import InvalidParameterError, TimeGrid

GENERATOR = "numpy.random.PCG64"
CHUNK = 8192


@dataclass(frozen=True)
class ClassicalParams:
    m: float = 1.0
    gamma: float = 1.0
    T: float = 1.0
    grid: TimeGrid = field(default_factory=lambda: TimeGrid(1e-3, 5000))
    n_traj: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if not self.m > 0:
            raise InvalidParameterError("m must be positive")
        if self.gamma < 0:
            raise InvalidParameterError("gamma must be non-negative")
        if self.T < 0:
            raise InvalidParameterError("T must be non-negative")
        if int(self.n_traj) != self.n_traj or self.n_traj < 1:
            raise InvalidParameterError("n_traj must be a positive integer")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidParameterError("seed must be a 64-bit unsigned integer")

    @property
    def noise_std(self) -> float:
        return sqrt(2.0 * self.m * self.gamma * self.T * self.grid.dt)


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def sample_dR(rng: np.random.Generator, params: ClassicalParams, size=None):
    """Random-force increment(s): Gaussian, mean 0, variance 2 m g T dt."""
    s = params.noise_std
    if s == 0.0:
        return 0.0 if size is None else np.zeros(size)
    return rng.normal(0.0, s, size)


def step_ou(u, dR, params: ClassicalParams):
    return u - params.gamma * u * params.grid.dt + dR / params.m


def fp_moments_analytic(t, u0: float, params: ClassicalParams):
    """(mean, variance) of the Fokker-Planck solution started at u0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("t must be non-negative")
    mean = u0 * np.exp(-params.gamma * t)
    var = (params.T / params.m) * -np.expm1(-2.0 * params.gamma * t)
    if mean.ndim == 0:
        return float(mean), float(var)
    return mean, var


@dataclass
class TrajectoryEnsemble:
    """Full trajectories, shape (n_traj, n_steps + 1)."""

    u: np.ndarray
    params: ClassicalParams
    u0: float

    @property
    def seed(self) -> int:
        return self.params.seed

    @property
    def times(self) -> np.ndarray:
        return self.params.grid.times


@dataclass
class MomentAccumulator:
    """Per-step power sums of u - c_j, with c_j the noise-free trajectory.

    Shifting by c_j keeps the sums well conditioned and makes a T = 0
    ensemble report exactly zero variance.
    """

    params: ClassicalParams
    u0: float
    n: int
    shift: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray
    s4: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.params.grid.times


def deterministic_path(u0: float, params: ClassicalParams) -> np.ndarray:
    j = np.arange(params.grid.n_steps + 1)
    return u0 * (1.0 - params.gamma * params.grid.dt) ** j


def _simulate_chunk(rng, size: int, u0s: tuple, params: ClassicalParams, store: bool):
    n = params.grid.n_steps
    k = len(u0s)
    u = np.repeat(np.asarray(u0s, dtype=float)[:, None], size, axis=1)
    shift = np.array([deterministic_path(v, params) for v in u0s])
    sums = np.zeros((k, 4, n + 1))
    path = np.empty((k, size, n + 1)) if store else None
    for j in range(n + 1):
        if j:
            u = step_ou(u, sample_dR(rng, params, size), params)
        if store:
            path[:, :, j] = u
        d = u - shift[:, j:j + 1]
        d2 = d * d
        sums[:, 0, j] = d.sum(1)
        sums[:, 1, j] = d2.sum(1)
        sums[:, 2, j] = (d2 * d).sum(1)
        sums[:, 3, j] = (d2 * d2).sum(1)
    return sums, path


def simulate(params: ClassicalParams, u0=0.0, *, store: bool = False, chunk: int = CHUNK):
    """Run the ensemble; returns a MomentAccumulator (and the ensemble if ``store``).

    ``u0`` may be a sequence of starting velocities; all of them are driven by
    the same noise realizations (common random numbers) and one result is
    returned per entry.
    """
    many = np.ndim(u0) > 0
    u0s = tuple(float(v) for v in np.atleast_1d(u0))
    n_chunks = -(-params.n_traj // chunk)
    total = np.zeros((len(u0s), 4, params.grid.n_steps + 1))
    paths = []
    for c in range(n_chunks):
        size = min(chunk, params.n_traj - c * chunk)
        sums, path = _simulate_chunk(chunk_rng(params.seed, c), size, u0s, params, store)
        total += sums
        if store:
            paths.append(path)
    accs = [MomentAccumulator(params, v, params.n_traj, deterministic_path(v, params), *total[i])
            for i, v in enumerate(u0s)]
    if store:
        full = np.concatenate(paths, axis=1)
        ens = [TrajectoryEnsemble(full[i], params, v) for i, v in enumerate(u0s)]
        out = list(zip(accs, ens))
        return out if many else out[0]
    return accs if many else accs[0]


@dataclass
class McEstimate:
    times: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    stderr_mean: np.ndarray
    stderr_var: np.ndarray


def _accumulate(ensemble: TrajectoryEnsemble) -> MomentAccumulator:
    shift = deterministic_path(ensemble.u0, ensemble.params)
    d = ensemble.u - shift
    return MomentAccumulator(ensemble.params, ensemble.u0, d.shape[0], shift,
                             d.sum(0), (d ** 2).sum(0), (d ** 3).sum(0), (d ** 4).sum(0))


def mc_estimate(ensemble) -> McEstimate:
    """Sample mean, unbiased variance and their standard errors per step."""
    acc = _accumulate(ensemble) if isinstance(ensemble, TrajectoryEnsemble) else ensemble
    n = acc.n
    if n < 2:
        raise InvalidParameterError("need at least two trajectories")
    m1 = acc.s1 / n
    mean = acc.shift + m1
    # central moments about the sample mean from the shifted power sums
    c2 = acc.s2 / n - m1 ** 2
    c4 = acc.s4 / n - 4 * m1 * acc.s3 / n + 6 * m1 ** 2 * acc.s2 / n - 3 * m1 ** 4
    c2 = np.maximum(c2, 0.0)
    var = c2 * n / (n - 1)
    se_mean = np.sqrt(var / n)
    se_var = np.sqrt(np.maximum(c4 - var ** 2 * (n - 3) / (n - 1), 0.0) / n)
    return McEstimate(acc.times, mean, var, se_mean, se_var)


def probability_conservation_check(samples, bins: int = 50) -> float:
    """Total mass of the normalized velocity histogram."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise InvalidParameterError("no samples")
    lo, hi = x.min(), x.max()
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    dens, edges = np.histogram(x, bins=bins, range=(lo, hi), density=True)
    return float(np.sum(dens * np.diff(edges)))


def euler_stationary_variance(params: ClassicalParams) -> float:
    """Stationary variance of the discrete update: 2 T g dt / (m (1 - (1 - g dt)^2))."""
    q = 1.0 - params.gamma * params.grid.dt
    return 2.0 * params.T * params.gamma * params.grid.dt / (params.m * (1.0 - q * q))


def relaxation_factor(params: ClassicalParams, t: float) -> float:
    return exp(-params.gamma * t)
