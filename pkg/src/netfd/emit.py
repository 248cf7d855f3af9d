"""Deterministic CSV + JSON artifact writer."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool

    @classmethod
    def at_most(cls, name: str, value, limit: float) -> "Check":
        v = float(abs(value))
        return cls(name, v, float(limit), bool(v <= limit))

    @classmethod
    def at_least(cls, name: str, value, limit: float) -> "Check":
        v = float(abs(value))
        return cls(name, v, float(limit), bool(v > limit))

    @classmethod
    def within(cls, name: str, value, lo: float, hi: float) -> "Check":
        v = float(value)
        return cls(name, v, float(hi), bool(lo <= v <= hi))


@dataclass
class Report:
    experiment: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    summary: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def csv_text(columns: list[str], rows) -> str:
    lines = [",".join(columns)]
    for r in rows:
        if len(r) != len(columns):
            raise ValueError("row length does not match header")
        lines.append(",".join(fmt(v) for v in r))
    return "\n".join(lines) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def metadata(report: Report, config: dict, seed: int, generator: str) -> dict:
    return {
        "experiment": report.experiment,
        "tool": "netfd",
        "version": __version__,
        "seed": seed,
        "generator": generator,
        "config": config,
        "columns": report.columns,
        "passed": report.passed,
        "checks": [{"name": c.name, "value": c.value, "limit": c.limit, "passed": c.passed}
                   for c in report.checks],
        "extra": report.extra,
    }


def emit(report: Report, out_dir: str | Path, stem: str, meta: dict,
         formats=("csv", "json")) -> list[Path]:
    """Write ``stem.csv`` and ``stem.json`` under ``out_dir``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = out / f"{stem}.csv"
        p.write_text(csv_text(report.columns, report.rows), encoding="utf-8", newline="\n")
        written.append(p)
    if "json" in formats:
        p = out / f"{stem}.json"
        text = json.dumps(_jsonable(meta), indent=2, sort_keys=True, ensure_ascii=False)
        p.write_text(text + "\n", encoding="utf-8", newline="\n")
        written.append(p)
    return written
