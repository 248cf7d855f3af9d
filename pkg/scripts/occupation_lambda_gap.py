"""n(t) from the lambda = 0 and lambda = 1 flows, and their gap, across dt and nu.

The gap is zero at nu = 0 and shrinks linearly with dt otherwise.
"""
import argparse

import numpy as np

from netfd.ito_core import TimeGrid
from netfd.kinetics import planck_nbar, run_kinetics
from netfd.rwa_model import RwaParams


def gap(dt: float, nu: float, kappa: float, t_max: float) -> tuple[float, float]:
    nbar = planck_nbar(1.0, 1.0)
    runs = [run_kinetics(RwaParams(kappa=kappa, nbar=nbar, lam=lam, nu=nu,
                                   grid=TimeGrid.from_t_max(dt, t_max)), 1.0) for lam in (0.0, 1.0)]
    return float(np.abs(runs[0].n_flow - runs[1].n_flow).max()), max(r.max_deviation for r in runs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kappa", type=float, default=0.5)
    ap.add_argument("--t-max", type=float, default=4.0)
    a = ap.parse_args()
    print("nu     dt       max|n_0 - n_1|   max kinetic deviation")
    for nu in (0.0, 0.5, 1.0):
        for dt in (4e-3, 2e-3, 1e-3):
            g, d = gap(dt, nu, a.kappa, a.t_max)
            print(f"{nu:<6} {dt:<8} {g:<16.3e} {d:.3e}")


if __name__ == "__main__":
    main()
