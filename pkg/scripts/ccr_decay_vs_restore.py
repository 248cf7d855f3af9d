"""[a(t), adag(t)] with and without the noise labels, side by side.

Writes a CSV (t, decay, restore, exp(-2 k t)) and prints the final row.
"""
import argparse
from math import exp
from pathlib import Path

from netfd.emit import csv_text
from netfd.rwa_model import decay_restoration


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kappa", type=float, default=0.5)
    ap.add_argument("--omega", type=float, default=1.0)
    ap.add_argument("--dt", type=float, default=1e-4)
    ap.add_argument("--t-max", type=float, default=1.0)
    ap.add_argument("--out", default="results/ccr_decay_vs_restore.csv")
    a = ap.parse_args()
    r = decay_restoration(a.kappa, a.omega, a.dt, a.t_max)
    off, on = r["decay"], r["restore"]
    rows = [[t, d.real, s.real, an] for t, d, s, an in zip(off.times, off.values, on.values, off.analytic)]
    out = Path(a.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(csv_text(["t", "decay", "restore", "analytic_decay"], rows), encoding="utf-8")
    print(f"t={a.t_max}: decay={off.final.real:.7f} (exp: {exp(-2 * a.kappa * a.t_max):.7f}) "
          f"restore={on.final.real:.7f}")


if __name__ == "__main__":
    main()
