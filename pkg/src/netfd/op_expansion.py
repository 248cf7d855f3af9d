"""Coefficient-flow operator algebra over system and noise labels.

Every Heisenberg operator of the two linear models is a finite complex
combination of basis labels (:class:`LinearOp`).  Products of two such
expansions are stored as :class:`QuadraticOp` in a canonical label order,
with the reordering c-number absorbed into the identity coefficient.
Martingale increments (system factor times a single noise increment) are
:class:`MixedBilinearOp`.

Noise products are never kept un-contracted when a vacuum expectation is
requested: they go through the pair-expectation table of a ``NoiseTables``
object (see :mod:`netfd.ito_core`), which must provide
``moment(x, y)``, ``commutator(x, y)`` and ``dt``.

:class:`LinearFlow` is the dense-array engine used by the model modules to
evolve four operators at once over a time grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Iterable, Mapping

import numpy as np

from .labels import (
    Label,
    NoiseLabel,
    dagger_label,
    is_noise,
    is_tilde,
    kind_of,
    model_of,
    order_key,
    project_label,
    tilde_label,
)

ZERO_TOL = 1e-12

_CCR = {
    ("a", "adag"): 1.0, ("adag", "a"): -1.0,
    ("atil", "atildag"): 1.0, ("atildag", "atil"): -1.0,
    ("x", "p"): 1j, ("p", "x"): -1j,
    # tilde conjugation of [x, p] = i gives [x~, p~] = -i
    ("xtil", "ptil"): -1j, ("ptil", "xtil"): 1j,
}


def label_commutator(x: Label, y: Label, tables=None) -> complex:
    """c-number commutator of two basis labels.

    System labels follow the CCR of their alphabet (cross-sector pairs
    vanish); system and noise labels commute; noise pairs are looked up in
    ``tables``.
    """
    nx, ny = is_noise(x), is_noise(y)
    if nx and ny:
        if tables is None:
            raise ValueError("noise commutator requested without NoiseTables")
        return tables.commutator(x, y)
    if nx or ny:
        return 0.0
    if model_of(x) != model_of(y):
        raise ValueError(f"labels {x!r} and {y!r} belong to different models")
    return _CCR.get((x, y), 0.0)


@dataclass(frozen=True)
class InitialState:
    """Initial physical moments: <a^dag a> = n0, <a a^dag> = n0 + 1.

    ``m`` and ``omega`` are only consulted for the x-X alphabet, where
    x and p are expanded in a, a^dag.
    """

    n0: float = 0.0
    m: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if self.n0 < 0:
            raise ValueError("n0 must be non-negative")


# --------------------------------------------------------------------------
# LinearOp


@dataclass(frozen=True, eq=False)
class LinearOp:
    """c0 * 1 + sum_l terms[l] * l."""

    terms: Mapping[Label, complex] = field(default_factory=dict)
    c0: complex = 0j

    @classmethod
    def of(cls, label: Label, coeff: complex = 1.0) -> "LinearOp":
        return cls({label: complex(coeff)})

    @classmethod
    def combo(cls, pairs: Iterable[tuple[complex, Label]]) -> "LinearOp":
        terms: dict = {}
        for c, lab in pairs:
            terms[lab] = terms.get(lab, 0j) + c
        return cls(terms)

    def coeff(self, label: Label) -> complex:
        return self.terms.get(label, 0j)

    def __add__(self, other: "LinearOp") -> "LinearOp":
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0j) + v
        return LinearOp(terms, self.c0 + other.c0)

    def __neg__(self) -> "LinearOp":
        return self * -1

    def __sub__(self, other: "LinearOp") -> "LinearOp":
        return self + (-other)

    def __mul__(self, c: complex) -> "LinearOp":
        return LinearOp({k: v * c for k, v in self.terms.items()}, self.c0 * c)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        vals = [abs(self.c0)] + [abs(v) for v in self.terms.values()]
        return max(vals)

    def residual(self, other: "LinearOp") -> float:
        return (self - other).max_abs()

    def pruned(self, tol: float = 0.0) -> "LinearOp":
        return LinearOp({k: v for k, v in self.terms.items() if abs(v) > tol}, self.c0)

    def __repr__(self):
        parts = [f"{v:.6g}*{k!r}" for k, v in self.terms.items()]
        if self.c0:
            parts.insert(0, f"{self.c0:.6g}")
        return "LinearOp(" + " + ".join(parts or ["0"]) + ")"


def commutator_linear(A: LinearOp, B: LinearOp, tables=None) -> complex:
    """[A, B] for linear expansions; always a c-number."""
    total = 0j
    for x, cx in A.terms.items():
        for y, cy in B.terms.items():
            if is_noise(x) != is_noise(y):
                continue
            if is_noise(x) and x.step != y.step:
                continue
            total += cx * cy * label_commutator(x, y, tables)
    return total


# --------------------------------------------------------------------------
# QuadraticOp


@dataclass(frozen=True, eq=False)
class QuadraticOp:
    """sum over canonical pairs (k, l) of c * k l, plus a linear part.

    Pairs are stored with ``order_key(k) <= order_key(l)``; for the RWA
    alphabet this is normal order (creation-type labels to the left).
    """

    pairs: Mapping[tuple, complex] = field(default_factory=dict)
    linear: LinearOp = field(default_factory=LinearOp)

    @classmethod
    def zero(cls) -> "QuadraticOp":
        return cls({}, LinearOp())

    def __add__(self, other: "QuadraticOp") -> "QuadraticOp":
        pairs = dict(self.pairs)
        for k, v in other.pairs.items():
            pairs[k] = pairs.get(k, 0j) + v
        return QuadraticOp(pairs, self.linear + other.linear)

    def __mul__(self, c: complex) -> "QuadraticOp":
        return QuadraticOp({k: v * c for k, v in self.pairs.items()}, self.linear * c)

    __rmul__ = __mul__

    def __neg__(self) -> "QuadraticOp":
        return self * -1

    def __sub__(self, other: "QuadraticOp") -> "QuadraticOp":
        return self + (-other)

    def max_abs(self) -> float:
        vals = [abs(v) for v in self.pairs.values()]
        vals.append(self.linear.max_abs())
        return max(vals)

    def residual(self, other: "QuadraticOp") -> float:
        return (self - other).max_abs()

    def coefficient_vector(self, keys: list) -> np.ndarray:
        """Flatten onto ``keys``; the key ``"1"`` stands for the identity."""
        out = []
        for k in keys:
            if k == "1":
                out.append(self.linear.c0)
            elif isinstance(k, tuple):
                out.append(self.pairs.get(k, 0j))
            else:
                out.append(self.linear.coeff(k))
        return np.array(out, dtype=complex)

    def support(self) -> list:
        keys = [k for k in self.pairs]
        keys += [k for k in self.linear.terms]
        return keys + ["1"]


class _QuadBuilder:
    """Accumulates raw ordered products into canonical storage."""

    def __init__(self, tables=None):
        self.tables = tables
        self.pairs: dict = {}
        self.lin: dict = {}
        self.c0 = 0j

    def add_pair(self, k: Label, l: Label, c: complex):
        if c == 0:
            return
        if order_key(k) > order_key(l):
            # k l = l k + [k, l]
            self.c0 += c * label_commutator(k, l, self.tables)
            k, l = l, k
        self.pairs[(k, l)] = self.pairs.get((k, l), 0j) + c

    def add_linear(self, op: LinearOp, c: complex = 1.0):
        for k, v in op.terms.items():
            self.lin[k] = self.lin.get(k, 0j) + c * v
        self.c0 += c * op.c0

    def build(self) -> QuadraticOp:
        return QuadraticOp(self.pairs, LinearOp(self.lin, self.c0))


def product(A: LinearOp, B: LinearOp, tables=None) -> QuadraticOp:
    """The operator product A B in canonical form."""
    qb = _QuadBuilder(tables)
    for k, a in A.terms.items():
        for l, b in B.terms.items():
            qb.add_pair(k, l, a * b)
    qb.add_linear(LinearOp(dict(B.terms)), A.c0)
    qb.add_linear(LinearOp(dict(A.terms)), B.c0)
    qb.c0 += A.c0 * B.c0
    return qb.build()


def canonicalize(raw: Mapping[tuple, complex], tables=None) -> QuadraticOp:
    """Canonical QuadraticOp from arbitrarily ordered ``{(k, l): c}``."""
    qb = _QuadBuilder(tables)
    for (k, l), c in raw.items():
        qb.add_pair(k, l, c)
    return qb.build()


def commutator_quadratic_linear(Q: QuadraticOp, A: LinearOp, tables=None) -> LinearOp:
    """[Q, A] = sum c (k [l, A] + [k, A] l), a linear expansion."""
    terms: dict = {}
    c0 = 0j
    for (k, l), c in Q.pairs.items():
        cl = commutator_linear(LinearOp.of(l), A, tables)
        ck = commutator_linear(LinearOp.of(k), A, tables)
        if cl:
            terms[k] = terms.get(k, 0j) + c * cl
        if ck:
            terms[l] = terms.get(l, 0j) + c * ck
    c0 += commutator_linear(Q.linear, A, tables)
    return LinearOp(terms, c0)


# --------------------------------------------------------------------------
# MixedBilinearOp


@dataclass(frozen=True, eq=False)
class MixedBilinearOp:
    """sum of c * s * n with one noise factor n per term.

    Keys are ``(s, n, side)`` with ``side`` either ``"right"`` (s n) or
    ``"left"`` (n s).  Noise increments commute with system operators, so
    the side is kept for bookkeeping of normal-ordered forms; contraction
    always multiplies noise factors in the order in which the two
    operators are multiplied.
    """

    terms: Mapping[tuple, complex] = field(default_factory=dict)

    def __add__(self, other: "MixedBilinearOp") -> "MixedBilinearOp":
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0j) + v
        return MixedBilinearOp(terms)

    def __mul__(self, c: complex) -> "MixedBilinearOp":
        return MixedBilinearOp({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def steps(self) -> set:
        return {n.step for (_, n, _) in self.terms}

    def max_abs(self) -> float:
        return max([abs(v) for v in self.terms.values()] + [0.0])

    def residual(self, other: "MixedBilinearOp") -> float:
        return (self - other).max_abs()

    def noise_projected(self) -> "MixedBilinearOp":
        """Replace each noise factor by its bra-vacuum projection."""
        out: dict = {}
        for (s, n, side), c in self.terms.items():
            key = (s, project_label(n), side)
            out[key] = out.get(key, 0j) + c
        return MixedBilinearOp(out)

    def merged_sides(self) -> dict:
        """Coefficients keyed by (s, n) with side information dropped."""
        out: dict = {}
        for (s, n, _), c in self.terms.items():
            out[(s, n)] = out.get((s, n), 0j) + c
        return out


def mixed(sys: LinearOp, noise: LinearOp, side: str = "right") -> MixedBilinearOp:
    """Expand (sum s)(sum n) or (sum n)(sum s) into a MixedBilinearOp."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if sys.c0 or noise.c0:
        raise ValueError("martingale factors must not carry identity parts")
    terms: dict = {}
    for s, cs in sys.terms.items():
        for n, cn in noise.terms.items():
            if not is_noise(n):
                raise ValueError(f"{n!r} is not a noise label")
            key = (s, n, side)
            terms[key] = terms.get(key, 0j) + cs * cn
    return MixedBilinearOp(terms)


def multiply_contract(A: MixedBilinearOp, B: MixedBilinearOp, tables) -> QuadraticOp:
    """A B with the two noise factors contracted through the weak relations."""
    sa, sb = A.steps(), B.steps()
    if not sa or not sb:
        return QuadraticOp.zero()
    if len(sa) != 1 or sa != sb:
        raise ValueError(f"multiply_contract needs a single common step, got {sa} and {sb}")
    qb = _QuadBuilder(tables)
    for (s1, n1, _), c1 in A.terms.items():
        for (s2, n2, _), c2 in B.terms.items():
            m = tables.moment(n1, n2)
            if m:
                qb.add_pair(s1, s2, c1 * c2 * m)
    return qb.build()


def bilinear_commutator(A: MixedBilinearOp, B: MixedBilinearOp, tables) -> QuadraticOp:
    """Exact [A, B] without contraction.

    [s1 n1, s2 n2] = s1 s2 [n1, n2] + [s1, s2] n2 n1, using that each
    system factor commutes with the noise factors.
    """
    qb = _QuadBuilder(tables)
    for (s1, n1, _), c1 in A.terms.items():
        for (s2, n2, _), c2 in B.terms.items():
            cn = label_commutator(n1, n2, tables) if n1.step == n2.step else 0.0
            qb.add_pair(s1, s2, c1 * c2 * cn)
            cs = commutator_linear(LinearOp.of(s1), LinearOp.of(s2), tables)
            qb.add_pair(n2, n1, c1 * c2 * cs)
    return qb.build()


def commutator_mixed_linear(M: MixedBilinearOp, A: LinearOp, tables=None) -> LinearOp:
    """[M, A] for A free of the martingale's own-step noise: sum c [s, A] n."""
    terms: dict = {}
    for (s, n, _), c in M.terms.items():
        v = commutator_linear(LinearOp.of(s), A, tables)
        if v:
            terms[n] = terms.get(n, 0j) + c * v
    return LinearOp(terms)


def martingale_vacuum_check(M: MixedBilinearOp, tables) -> complex:
    """Largest-modulus coefficient of <|M|> (noise vacuum only).

    A system factor keeps its operator character; factors that are
    themselves noise labels of other steps are contracted pairwise.
    """
    sys_part: dict = {}
    c0 = 0j
    for (s, n, side), c in M.terms.items():
        mean_n = tables.mean(n)
        if is_noise(s):
            pair = (s, n) if side == "right" else (n, s)
            c0 += c * tables.moment(*pair)
        elif mean_n:
            sys_part[s] = sys_part.get(s, 0j) + c * mean_n
    vals = [c0] + list(sys_part.values())
    return max(vals, key=abs)


# --------------------------------------------------------------------------
# conjugations and projection


def tilde_conjugate(obj, tables=None):
    """Antilinear involution: labels to tilde partners, coefficients conjugated."""
    if isinstance(obj, LinearOp):
        return LinearOp({tilde_label(k): np.conj(v) for k, v in obj.terms.items()},
                        np.conj(obj.c0))
    if isinstance(obj, QuadraticOp):
        qb = _QuadBuilder(tables)
        for (k, l), c in obj.pairs.items():
            qb.add_pair(tilde_label(k), tilde_label(l), np.conj(c))
        qb.add_linear(tilde_conjugate(obj.linear))
        return qb.build()
    if isinstance(obj, MixedBilinearOp):
        return MixedBilinearOp({(tilde_label(s), tilde_label(n), side): np.conj(c)
                                for (s, n, side), c in obj.terms.items()})
    raise TypeError(f"cannot tilde-conjugate {type(obj).__name__}")


def dagger(obj, tables=None):
    """Hermitian adjoint; reverses products."""
    if isinstance(obj, LinearOp):
        return LinearOp({dagger_label(k): np.conj(v) for k, v in obj.terms.items()},
                        np.conj(obj.c0))
    if isinstance(obj, QuadraticOp):
        qb = _QuadBuilder(tables)
        for (k, l), c in obj.pairs.items():
            qb.add_pair(dagger_label(l), dagger_label(k), np.conj(c))
        qb.add_linear(dagger(obj.linear))
        return qb.build()
    if isinstance(obj, MixedBilinearOp):
        flip = {"left": "right", "right": "left"}
        return MixedBilinearOp({(dagger_label(s), dagger_label(n), flip[side]): np.conj(c)
                                for (s, n, side), c in obj.terms.items()})
    raise TypeError(f"cannot take adjoint of {type(obj).__name__}")


def bra_project(A: LinearOp) -> LinearOp:
    """<<1| A expressed over physical labels only."""
    terms: dict = {}
    for k, v in A.terms.items():
        p = project_label(k)
        terms[p] = terms.get(p, 0j) + v
    return LinearOp(terms, A.c0)


# --------------------------------------------------------------------------
# expectations


def _x_to_a(label: str, state: InitialState) -> list:
    s = 1.0 / sqrt(2.0 * state.m * state.omega)
    r = sqrt(state.m * state.omega / 2.0)
    if label == "x":
        return [(s, "a"), (s, "adag")]
    if label == "p":
        return [(-1j * r, "a"), (1j * r, "adag")]
    raise ValueError(f"cannot expand {label!r} in ladder operators")


def _physical_moment(p: str, q: str, state: InitialState) -> complex:
    if p in ("x", "p") or q in ("x", "p"):
        lp = _x_to_a(p, state) if p in ("x", "p") else [(1.0, p)]
        lq = _x_to_a(q, state) if q in ("x", "p") else [(1.0, q)]
        return sum(cp * cq * _physical_moment(a, b, state) for cp, a in lp for cq, b in lq)
    if (p, q) == ("adag", "a"):
        return state.n0
    if (p, q) == ("a", "adag"):
        return state.n0 + 1.0
    return 0.0


def pair_expectation(k: Label, l: Label, state: InitialState, tables) -> complex:
    """<<1| k l |0>> for two basis labels.

    The left vacuum removes tilde labels: a tilde label directly next to
    the bra is projected, and a tilde label in second position commutes
    through the (physical or projected) first factor before projection.
    Noise pairs are taken from the moment table; single increments and
    system-noise pairs have zero expectation.
    """
    nk, nl = is_noise(k), is_noise(l)
    if nk and nl:
        return tables.moment(k, l) if k.step == l.step else 0.0
    if nk or nl:
        return 0.0
    if is_tilde(l):
        p, q = project_label(l), project_label(k)
    else:
        p, q = project_label(k), l
    return _physical_moment(p, q, state)


def expectation(Q: QuadraticOp, state: InitialState, tables) -> complex:
    """<<1| Q |0>> for a canonical QuadraticOp."""
    total = Q.linear.c0
    for (k, l), c in Q.pairs.items():
        total += c * pair_expectation(k, l, state, tables)
    return total


def expectation_product(X: LinearOp, Y: LinearOp, state: InitialState, tables) -> complex:
    """<<1| X Y |0>> without forming the full pair expansion."""
    total = X.c0 * Y.c0
    xs = {k: v for k, v in X.terms.items() if not is_noise(k)}
    ys = {k: v for k, v in Y.terms.items() if not is_noise(k)}
    for k, a in xs.items():
        for l, b in ys.items():
            total += a * b * pair_expectation(k, l, state, tables)
    by_step: dict = {}
    for l, b in Y.terms.items():
        if is_noise(l):
            by_step.setdefault(l.step, []).append((l, b))
    for k, a in X.terms.items():
        if is_noise(k):
            for l, b in by_step.get(k.step, ()):
                total += a * b * tables.moment(k, l)
    return total


# --------------------------------------------------------------------------
# quantum Ito formula


def ito_increment(A: LinearOp, H_S: QuadraticOp, Pi: QuadraticOp, dM: MixedBilinearOp,
                  tables) -> LinearOp:
    """dA = i[H_S, A] dt - [Pi, A] dt + i[dM, A] - dM [dM, A].

    ``A`` is a Schroedinger-picture linear operator free of the current
    step's noise; the last product is contracted through the weak
    relations.
    """
    dt = tables.dt
    out = commutator_quadratic_linear(H_S, A, tables) * (1j * dt)
    out = out - commutator_quadratic_linear(Pi, A, tables) * dt
    out = out + commutator_mixed_linear(dM, A, tables) * 1j
    corr: dict = {}
    for (s2, n2, _), c2 in dM.terms.items():
        v = commutator_linear(LinearOp.of(s2), A, tables)
        if not v:
            continue
        for (s1, n1, _), c1 in dM.terms.items():
            m = tables.moment(n1, n2)
            if m:
                corr[s1] = corr.get(s1, 0j) + c1 * c2 * v * m
    return out - LinearOp(corr)


def generator_matrices(labels: tuple, noise_kinds: tuple, increments: Mapping[Label, LinearOp],
                       dt: float, step: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """(drift, injection) matrices read off per-label increments.

    ``increments[label]`` is dA for A = label, expressed over the same
    system labels (times dt) and the noise labels of ``step``.
    """
    n, nk = len(labels), len(noise_kinds)
    drift = np.zeros((n, n), dtype=complex)
    inj = np.zeros((n, nk), dtype=complex)
    sys_index = {lab: i for i, lab in enumerate(labels)}
    kind_index = {k: j for j, k in enumerate(noise_kinds)}
    for i, lab in enumerate(labels):
        inc = increments[lab]
        if abs(inc.c0) > 0:
            raise ValueError("increment has an identity component")
        for k, v in inc.terms.items():
            if is_noise(k):
                if k.step != step:
                    raise ValueError(f"increment references foreign step {k!r}")
                inj[i, kind_index[k.kind]] += v
            else:
                drift[i, sys_index[k]] += v / dt
    return drift, inj


# --------------------------------------------------------------------------
# dense coefficient flow


class LinearFlow:
    """Heisenberg coefficient flow v(t+dt) = (1 + D dt) v(t) + N dn_t.

    ``v`` holds one operator per system label, each initially equal to its
    own label.  Coefficients live in a dense array whose columns are the
    system labels followed by ``noise_kinds`` for every grid step.  The
    matrix of mutual commutators is propagated alongside, so the CCR trace
    costs O(1) per step independently of the coefficient store.
    """

    def __init__(self, labels, noise_kinds, drift, injection, grid, tables, *, track=True):
        self.labels = tuple(labels)
        self.noise_kinds = tuple(noise_kinds)
        self.grid = grid
        self.tables = tables
        self.drift = np.asarray(drift, dtype=complex)
        self.injection = np.asarray(injection, dtype=complex)
        n = len(self.labels)
        self.propagator = np.eye(n) + self.drift * grid.dt
        self.step_index = 0
        self.track = track
        if track:
            cols = n + len(self.noise_kinds) * grid.n_steps
            self.coeffs = np.zeros((n, cols), dtype=complex)
            self.coeffs[:, :n] = np.eye(n)
        self.gram = np.array([[label_commutator(a, b, tables) for b in self.labels]
                              for a in self.labels], dtype=complex)
        kinds = [NoiseLabel(k, 0) for k in self.noise_kinds]
        K = np.array([[tables.commutator(x, y) for y in kinds] for x in kinds], dtype=complex)
        self._noise_gram = self.injection @ K @ self.injection.T

    @property
    def n_sys(self) -> int:
        return len(self.labels)

    @property
    def active_columns(self) -> int:
        return self.n_sys + len(self.noise_kinds) * self.step_index

    @property
    def time(self) -> float:
        return self.step_index * self.grid.dt

    def advance(self) -> None:
        if self.step_index >= self.grid.n_steps:
            raise IndexError("flow already at the end of its time grid")
        P = self.propagator
        if self.track:
            act = self.active_columns
            self.coeffs[:, :act] = P @ self.coeffs[:, :act]
            nk = len(self.noise_kinds)
            self.coeffs[:, act:act + nk] += self.injection
        self.gram = P @ self.gram @ P.T + self._noise_gram
        self.step_index += 1

    def column_label(self, col: int) -> Label:
        n = self.n_sys
        if col < n:
            return self.labels[col]
        j, k = divmod(col - n, len(self.noise_kinds))
        return NoiseLabel(self.noise_kinds[k], j)

    def _row(self, which) -> int:
        return self.labels.index(which) if isinstance(which, str) else int(which)

    def coefficients(self, which) -> np.ndarray:
        self._require_track()
        return self.coeffs[self._row(which), :self.active_columns]

    def op(self, which) -> LinearOp:
        """The current Heisenberg operator as a LinearOp."""
        row = self.coefficients(which)
        terms = {self.column_label(c): complex(row[c]) for c in np.flatnonzero(row)}
        return LinearOp(terms)

    def commutator(self, i, k) -> complex:
        return complex(self.gram[self._row(i), self._row(k)])

    def _require_track(self):
        if not self.track:
            raise RuntimeError("coefficient tracking disabled for this flow")

    # projection onto physical labels, vectorized over the column layout
    def _projection_maps(self):
        phys_sys = tuple(dict.fromkeys(project_label(l) for l in self.labels))
        phys_kinds = tuple(dict.fromkeys(kind_of(project_label(NoiseLabel(k, 0)))
                                         for k in self.noise_kinds))
        Rs = np.zeros((self.n_sys, len(phys_sys)))
        for i, lab in enumerate(self.labels):
            Rs[i, phys_sys.index(project_label(lab))] = 1.0
        Rk = np.zeros((len(self.noise_kinds), len(phys_kinds)))
        for i, k in enumerate(self.noise_kinds):
            Rk[i, phys_kinds.index(kind_of(project_label(NoiseLabel(k, 0))))] = 1.0
        return phys_sys, phys_kinds, Rs, Rk

    def projected(self, which) -> tuple[np.ndarray, np.ndarray]:
        """Bra-projected coefficients: (system part, noise part[step, kind])."""
        if not hasattr(self, "_pmaps"):
            self._pmaps = self._projection_maps()
        _, _, Rs, Rk = self._pmaps
        row = self.coefficients(which)
        n = self.n_sys
        noise = row[n:].reshape(self.step_index, len(self.noise_kinds))
        return row[:n] @ Rs, noise @ Rk

    def projected_labels(self) -> tuple[tuple, tuple]:
        if not hasattr(self, "_pmaps"):
            self._pmaps = self._projection_maps()
        return self._pmaps[0], self._pmaps[1]

    def pair_expectation(self, i, k, state: InitialState) -> complex:
        """<<1| v_i(t) v_k(t) |0>> evaluated directly on the coefficient arrays."""
        if not hasattr(self, "_emats"):
            Es = np.array([[pair_expectation(a, b, state, self.tables) for b in self.labels]
                           for a in self.labels], dtype=complex)
            kinds = [NoiseLabel(q, 0) for q in self.noise_kinds]
            En = np.array([[self.tables.moment(a, b) for b in kinds] for a in kinds],
                          dtype=complex)
            self._emats = (state, Es, En)
        st, Es, En = self._emats
        if st != state:
            del self._emats
            return self.pair_expectation(i, k, state)
        x, y = self.coefficients(i), self.coefficients(k)
        n, nk = self.n_sys, len(self.noise_kinds)
        total = x[:n] @ Es @ y[:n]
        xn = x[n:].reshape(-1, nk)
        yn = y[n:].reshape(-1, nk)
        total += np.einsum("jk,kl,jl->", xn, En, yn)
        return complex(total)
