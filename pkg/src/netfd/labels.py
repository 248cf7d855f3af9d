"""Basis labels of the doubled (tilde) operator algebra.

System labels are plain strings; noise increments carry a time-step index.
Two alphabets exist, one per model:

* RWA model: ``a, adag, atil, atildag`` with increments
  ``dB, dBdag, dBtil, dBtildag``.
* x-X model: ``x, p, xtil, ptil`` with increments ``dX, dXtil``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# system alphabets, listed in canonical (normal) order: creation-type first
RWA_SYSTEM = ("adag", "atildag", "a", "atil")
XX_SYSTEM = ("x", "xtil", "p", "ptil")

RWA_NOISE = ("dBdag", "dBtildag", "dB", "dBtil")
XX_NOISE = ("dX", "dXtil")

TILDE = {
    "a": "atil", "atil": "a", "adag": "atildag", "atildag": "adag",
    "x": "xtil", "xtil": "x", "p": "ptil", "ptil": "p",
    "dB": "dBtil", "dBtil": "dB", "dBdag": "dBtildag", "dBtildag": "dBdag",
    "dX": "dXtil", "dXtil": "dX",
}

DAGGER = {
    "a": "adag", "adag": "a", "atil": "atildag", "atildag": "atil",
    "x": "x", "p": "p", "xtil": "xtil", "ptil": "ptil",
    "dB": "dBdag", "dBdag": "dB", "dBtil": "dBtildag", "dBtildag": "dBtil",
    "dX": "dX", "dXtil": "dXtil",
}

# <<1| A~dag = <<1| A  =>  projection of each tilde label onto a physical one
BRA_PROJECT = {
    "atildag": "a", "atil": "adag",
    "xtil": "x", "ptil": "p",
    "dBtildag": "dB", "dBtil": "dBdag",
    "dXtil": "dX",
}

TILDE_KINDS = frozenset({"atil", "atildag", "xtil", "ptil", "dBtil", "dBtildag", "dXtil"})

_SYSTEM_ORDER = {k: i for i, k in enumerate(RWA_SYSTEM)} | {k: i for i, k in enumerate(XX_SYSTEM)}
_NOISE_ORDER = {k: i for i, k in enumerate(RWA_NOISE)} | {k: i for i, k in enumerate(XX_NOISE)}


@dataclass(frozen=True, order=True)
class NoiseLabel:
    """A noise increment of a given kind at grid step ``step``."""

    kind: str
    step: int

    def __post_init__(self):
        if self.kind not in _NOISE_ORDER:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.step < 0:
            raise ValueError("noise step must be non-negative")

    def __repr__(self):
        return f"{self.kind}[{self.step}]"


Label = Union[str, NoiseLabel]


def is_noise(label: Label) -> bool:
    return isinstance(label, NoiseLabel)


def kind_of(label: Label) -> str:
    return label.kind if isinstance(label, NoiseLabel) else label


def is_tilde(label: Label) -> bool:
    return kind_of(label) in TILDE_KINDS


def model_of(label: Label) -> str:
    """Return ``"rwa"`` or ``"xx"`` for the alphabet a label belongs to."""
    k = kind_of(label)
    if k in RWA_SYSTEM or k in RWA_NOISE:
        return "rwa"
    if k in XX_SYSTEM or k in XX_NOISE:
        return "xx"
    raise ValueError(f"unknown label {label!r}")


def _relabel(label: Label, table: dict) -> Label:
    if isinstance(label, NoiseLabel):
        return NoiseLabel(table.get(label.kind, label.kind), label.step)
    if label not in _SYSTEM_ORDER:
        raise ValueError(f"unknown system label {label!r}")
    return table.get(label, label)


def tilde_label(label: Label) -> Label:
    return _relabel(label, TILDE)


def dagger_label(label: Label) -> Label:
    return _relabel(label, DAGGER)


def project_label(label: Label) -> Label:
    return _relabel(label, BRA_PROJECT)


def order_key(label: Label) -> tuple:
    """Total order used for canonical pair storage (system before noise)."""
    if isinstance(label, NoiseLabel):
        return (1, label.step, _NOISE_ORDER[label.kind])
    return (0, 0, _SYSTEM_ORDER[label])
