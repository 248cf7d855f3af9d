"""``netfd <experiment> --config <path> [--set key=value ...] [--out dir]``.

Exit status: 0 when every declared tolerance holds, 1 when one fails,
2 for usage, configuration and I/O errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import EXPERIMENTS, SWEEP_AXES, ConfigError, ExperimentConfig, load_config
from .emit import Check, Report, emit, metadata
from .experiments import generator_of, run

EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_sweep(text: str) -> tuple[str, str, list[float]]:
    if "=" not in text:
        raise UsageError(f"--sweep expects axis=v1,v2,..., got {text!r}")
    axis, raw = text.split("=", 1)
    axis = axis.strip()
    if axis not in SWEEP_AXES:
        raise UsageError(f"unknown sweep axis {axis!r}; choose from dt, lam, nu, nbar")
    parts = [v.strip() for v in raw.split(",") if v.strip()]
    if not parts:
        raise UsageError("sweep value list is empty")
    try:
        values = [float(v) for v in parts]
    except ValueError as exc:
        raise UsageError(f"non-numeric sweep value in {raw!r}") from exc
    return axis, SWEEP_AXES[axis], values


def sweep(cfg: ExperimentConfig, axis: str, values: list[float]) -> Report:
    """One row per value with the experiment's scalar summary."""
    if not values:
        raise UsageError("sweep value list is empty")
    section, key = SWEEP_AXES[axis]
    rep = Report(f"{cfg.experiment}-sweep-{key}", [key, "summary", "passed"])
    for v in values:
        sub = run(cfg.with_value(section, key, v))
        rep.rows.append([v, sub.summary, sub.passed])
        rep.checks += [Check(f"{key}={v!r}:{c.name}", c.value, c.limit, c.passed)
                       for c in sub.checks]
    rep.summary = max((r[1] for r in rep.rows), default=0.0)
    return rep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="netfd", description="Doubled-space Langevin experiments.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="TOML configuration file")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override a config value, e.g. model.kappa=0.5 (repeatable)")
    ap.add_argument("--out", help="output directory (overrides output.dir)")
    ap.add_argument("--sweep", metavar="AXIS=V1,V2,...",
                    help="sweep one of dt, lam, nu, nbar and write a summary CSV")
    ap.add_argument("--quiet", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.experiment, args.config, args.set)
        out_dir = Path(args.out) if args.out else Path(cfg["output"]["dir"])
        if args.sweep is not None:
            axis, _, values = parse_sweep(args.sweep)
            report = sweep(cfg, axis, values)
        else:
            report = run(cfg)
    except (ConfigError, UsageError, ValueError) as exc:
        print(f"netfd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    meta = metadata(report, cfg.data, cfg.seed, generator_of(cfg.experiment))
    if args.sweep is not None:
        meta["sweep"] = args.sweep
    try:
        paths = emit(report, out_dir, report.experiment, meta, cfg["output"]["formats"])
    except OSError as exc:
        print(f"netfd: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not args.quiet:
        for c in report.checks:
            print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.6g} (limit {c.limit:.3g})")
        for p in paths:
            print(f"wrote {p}")
    failed = report.failures()
    if failed:
        print("netfd: tolerance violated: " + ", ".join(c.name for c in failed), file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
