"""dt sweep on kinetics-check and convergence-order summary.

    python scripts/sweep_dt.py [--values 1e-2,5e-3,2.5e-3]
"""
import argparse
import sys

from netfd.cli import main as netfd


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--experiment", default="kinetics-check")
    ap.add_argument("--values", default="1e-2,5e-3,2.5e-3")
    ap.add_argument("--out", default="results")
    a = ap.parse_args()
    sys.exit(netfd([a.experiment, "--sweep", f"dt={a.values}", "--out", a.out]))
