"""Experiment configuration: TOML sections, dotted overrides, strict keys."""
from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import tomli

EXPERIMENTS = (
    "ccr-decay", "ccr-restore", "rwa-run", "lambda-sweep", "identity-audit",
    "xx-run", "xx-audit", "ou-mc", "kinetics-check", "convergence",
)

# global defaults reproduce the commutator decay/restoration run
DEFAULTS = {
    "model": {
        "omega": 1.0, "kappa": 0.5, "nbar": 0.0, "T": -1.0,
        "lam": 1.0, "nu": 0.5, "m": 1.0, "n0": 0.0,
        "gamma": 1.0, "u0": 0.0,
        "lams": [0.0, 0.25, 0.5, 0.75, 1.0],
    },
    "grid": {"dt": 1e-4, "t_max": 1.0, "n_steps": 0},
    "mc": {"n_traj": 100_000, "seed": 0},
    "tol": {
        "identity": 1e-12, "decay": 1e-4, "restore": 1e-2,
        "ccr_c": 5.0, "kinetics": 5e-3, "n_stderr": 3.0,
        "order_low": 1.6, "order_high": 2.4,
    },
    "output": {"dir": "results", "formats": ["csv", "json"]},
}

# per-experiment defaults layered between DEFAULTS and the user's file
EXPERIMENT_DEFAULTS = {
    "ccr-decay": {},
    "ccr-restore": {},
    "rwa-run": {"grid": {"dt": 1e-3, "t_max": 2.0}, "model": {"lam": 0.5, "nbar": 0.5}},
    "lambda-sweep": {"grid": {"dt": 1e-3, "t_max": 2.0}, "model": {"nbar": 0.5}},
    "identity-audit": {"grid": {"dt": 1e-3, "t_max": 0.05}, "model": {"nbar": 0.5}},
    "xx-run": {"grid": {"dt": 1e-3, "t_max": 2.0}, "model": {"nbar": 0.5}},
    "xx-audit": {"grid": {"dt": 1e-3, "t_max": 0.01}, "model": {"nbar": 0.5}},
    "ou-mc": {"grid": {"dt": 1e-3, "t_max": 5.0}, "model": {"T": 1.0, "u0": 0.0}},
    "kinetics-check": {"grid": {"dt": 1e-3, "t_max": 4.0}, "model": {"n0": 1.0}},
    "convergence": {"grid": {"dt": 1e-2, "t_max": 2.0}, "model": {"nbar": 0.5, "n0": 1.0}},
}

SWEEP_AXES = {"dt": ("grid", "dt"), "lam": ("model", "lam"), "λ": ("model", "lam"),
              "nu": ("model", "nu"), "ν": ("model", "nu"),
              "nbar": ("model", "nbar"), "n̄": ("model", "nbar")}


class ConfigError(ValueError):
    """Malformed or unknown configuration (a usage error)."""


def _merge(base: dict, over: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        path = f"{where}{k}"
        if k not in base:
            raise ConfigError(f"unknown config key {path!r}")
        if isinstance(base[k], dict):
            if not isinstance(v, dict):
                raise ConfigError(f"{path!r} must be a table")
            out[k] = _merge(base[k], v, path + ".")
        else:
            out[k] = _coerce(base[k], v, path)
    return out


def _coerce(default, value, path: str):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{path!r} expects a boolean")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path!r} expects an integer")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path!r} expects a number")
        return float(value)
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{path!r} expects a list")
        return list(value)
    if not isinstance(value, type(default)):
        raise ConfigError(f"{path!r} expects {type(default).__name__}")
    return value


def parse_assignment(text: str) -> tuple[list[str], object]:
    """``a.b=value`` with the value read as a TOML literal (bare strings allowed)."""
    if "=" not in text:
        raise ConfigError(f"--set expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError("empty key in --set")
    try:
        value = tomli.loads(f"v = {raw.strip()}")["v"]
    except tomli.TOMLDecodeError:
        value = raw.strip()
    return key.split("."), value


def _nest(path: list[str], value) -> dict:
    out: dict = value
    for part in reversed(path):
        out = {part: out}
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    data: dict

    def __getitem__(self, section: str) -> dict:
        return self.data[section]

    @property
    def seed(self) -> int:
        return int(self.data["mc"]["seed"])

    def with_value(self, section: str, key: str, value) -> "ExperimentConfig":
        data = _merge(self.data, {section: {key: value}})
        return ExperimentConfig(self.experiment, data)


def load_config(experiment: str, path: str | Path | None = None,
                sets: list[str] | None = None) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    data = _merge(DEFAULTS, EXPERIMENT_DEFAULTS[experiment])
    if path is not None:
        try:
            with open(path, "rb") as fh:
                user = tomli.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
        named = user.pop("experiment", experiment)
        if named != experiment:
            raise ConfigError(f"config is for {named!r}, not {experiment!r}")
        data = _merge(data, user)
    for s in sets or []:
        keys, value = parse_assignment(s)
        data = _merge(data, _nest(keys, value))
    return ExperimentConfig(experiment, data)
