"""Run every experiment with its config in configs/ and report exit codes.

    python scripts/run_all.py [--out results] [--skip ou-mc]
"""
import argparse
import sys
import time
from pathlib import Path

from netfd.cli import main as netfd
from netfd.config import EXPERIMENTS

ROOT = Path(__file__).resolve().parent.parent


def run_all(out: str, skip: list[str]) -> int:
    worst = 0
    for exp in EXPERIMENTS:
        if exp in skip:
            continue
        cfg = ROOT / "configs" / f"{exp}.toml"
        t = time.perf_counter()
        rc = netfd([exp, "--config", str(cfg), "--out", out, "--quiet"])
        print(f"{exp:16s} exit={rc} {time.perf_counter() - t:6.2f}s")
        worst = max(worst, rc)
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--skip", action="append", default=[])
    args = ap.parse_args()
    sys.exit(run_all(args.out, args.skip))
