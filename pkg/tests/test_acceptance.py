"""The twelve acceptance criteria at their stated tolerances.

Each test prints one ``PASS``/``FAIL`` line (also collected into the pytest
terminal summary).  Run standalone with ``python tests/test_acceptance.py``.
"""
import subprocess
import sys
import time
from itertools import product as cartesian
from math import exp, log

import numpy as np

from conftest import ACCEPTANCE_LINES
from netfd import classical_ou as ou
from netfd import rwa_model as rw
from netfd import xx_model as xx
from netfd.ito_core import TimeGrid, bogoliubov_checks
from netfd.kinetics import planck_nbar, run_kinetics

LAMS = (0.0, 0.25, 0.5, 0.75, 1.0)


def verdict(n: int, checks: dict):
    """checks: name -> (passed, detail). Prints and asserts."""
    ok = all(p for p, _ in checks.values())
    detail = "; ".join(f"{k}={d}{'' if p else ' (FAIL)'}" for k, (p, d) in checks.items())
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def timed(fn, *a, **kw):
    t = time.perf_counter()
    out = fn(*a, **kw)
    return out, time.perf_counter() - t


def rwa(dt, t_max, **kw):
    return rw.RwaParams(grid=TimeGrid.from_t_max(dt, t_max), **kw)


def test_criterion_01_commutator_decay():
    tr, sec = timed(rw.ccr_trace, rwa(1e-4, 1.0, kappa=0.5, lam=1.0), noise=False)
    err = abs(tr.final - 0.367879)
    verdict(1, {"|c-0.367879|": (err <= 1e-4, f"{err:.2e}"),
                "|c-e^-1|": (abs(tr.final - exp(-1)) <= 1e-4, f"{abs(tr.final - exp(-1)):.2e}"),
                "runtime_s": (sec < 1.0, f"{sec:.2f}")})


def test_criterion_02_commutator_restoration():
    def run():
        return [float(np.abs(rw.ccr_trace(rwa(dt, 1.0, kappa=0.5, lam=1.0)).values - 1).max())
                for dt in (1e-4, 5e-5)]
    (e1, e2), sec = timed(run)
    verdict(2, {"max|c-1|": (e1 <= 1e-2, f"{e1:.2e}"),
                "halving_ratio": (1.6 <= e1 / e2 <= 2.4, f"{e1 / e2:.3f}"),
                "runtime_s": (sec < 5.0, f"{sec:.2f}")})


def test_criterion_03_ccr_for_all_lambda():
    dts = (1e-3, 5e-4, 2.5e-4)
    err = {(lam, dt): float(np.abs(rw.ccr_trace(rwa(dt, 2.0, nbar=0.5, lam=lam)).values - 1).max())
           for lam in LAMS for dt in dts}
    # one constant bounds every (lambda, dt) point; first order means it stays put as dt shrinks
    C = max(e / dt for (_, dt), e in err.items())
    ratios = [err[(lam, dts[i])] / err[(lam, dts[i + 1])] for lam in LAMS for i in range(2)]
    verdict(3, {"C": (C <= 5.0, f"{C:.4f}"),
                "all_within_C_dt": (all(e <= C * dt for (_, dt), e in err.items()), "true"),
                "halving_ratios": (all(1.6 <= r <= 2.4 for r in ratios),
                                   f"[{min(ratios):.3f},{max(ratios):.3f}]")})


def test_criterion_04_martingale_audit():
    def run():
        worst = {"commutator": 0.0, "product": 0.0}
        for kappa, nbar, nu in cartesian((0.1, 0.5, 1.3), (0.0, 0.5, 2.0), (0.0, 0.5, 1.0)):
            p = rw.RwaParams(kappa=kappa, nbar=nbar, nu=nu)
            for lam in (0.0, 0.5, 1.0):
                r = rw.martingale_identities(lam, p)
                worst["commutator"] = max(worst["commutator"], r["non_commutativity"])
                worst["product"] = max(worst["product"], r["fluctuation_dissipation"])
        return worst
    w, sec = timed(run)
    verdict(4, {"[dM-,dM+]+2PiR_dt": (w["commutator"] <= 1e-12, f"{w['commutator']:.1e}"),
                "dMdM+2(lamPiR+PiD)dt": (w["product"] <= 1e-12, f"{w['product']:.1e}"),
                "runtime_s": (sec < 1.0, f"{sec:.2f}")})


def test_criterion_05_lambda_independence():
    r = rw.lambda_invariance_of_bra_dynamics(LAMS, rw.RwaParams(nbar=0.5, grid=TimeGrid(1e-3, 10_000)))
    verdict(5, {"max_per_step_deviation": (r["max_deviation"] <= 1e-12, f"{r['max_deviation']:.1e}"),
                "steps": (len(r["per_step"]) - 1 == 10_000, "10000")})


def test_criterion_06_input_output():
    res = {lam: float(rw.input_output_trace(rw.RwaParams(nbar=0.5, lam=lam), 200).max())
           for lam in (0.0, 0.37, 1.0)}
    verdict(6, {f"lam={lam}": (v <= 1e-12, f"{v:.1e}") for lam, v in res.items()})


def test_criterion_07_xx_fluctuation_dissipation():
    rng = np.random.default_rng(7)
    fd = strat = 0.0
    for _ in range(40):
        m, omega, kappa = rng.uniform(0.2, 3.0, 3)
        p = xx.XxParams(m=m, omega=omega, kappa=kappa, nbar=rng.uniform(0, 5))
        fd = max(fd, xx.martingale_report(p)["fluctuation_dissipation"])
        strat = max(strat, abs(xx.stratonovich_report(p)["stratonovich_pi_d"]))
    verdict(7, {"dMdM+2PiD_dt": (fd <= 1e-12, f"{fd:.1e}"),
                "stratonovich_PiD_coeff": (strat <= 1e-12, f"{strat:.1e}")})


def test_criterion_08_kramers():
    p = xx.XxParams(nbar=0.5, grid=TimeGrid.from_t_max(1e-3, 2.0))
    k = xx.bra_kramers(p)
    dts = (1e-3, 5e-4)
    errs = [float(np.abs(xx.xp_ccr_trace(p.with_(grid=TimeGrid.from_t_max(dt, 2.0))) - 1j).max())
            for dt in dts]
    C = max(e / dt for e, dt in zip(errs, dts))
    verdict(8, {"termwise": (k.max_residual <= 1e-12, f"{k.max_residual:.1e}"),
                "[x,p]-i_C": (C <= 5.0, f"{C:.3f}"),
                "halving_ratio": (1.6 <= errs[0] / errs[1] <= 2.4, f"{errs[0] / errs[1]:.3f}")})


def test_criterion_09_classical_chain():
    p = ou.ClassicalParams(m=1, gamma=1, T=1, grid=TimeGrid.from_t_max(1e-3, 5.0), n_traj=100_000, seed=0)
    accs, sec = timed(ou.simulate, p, [0.0, 1.0])
    e0, e1 = ou.mc_estimate(accs[0]), ou.mc_estimate(accs[1])
    zv = abs(e0.var[-1] - (1 - exp(-10))) / e0.stderr_var[-1]
    zm = abs(e1.mean[-1] - exp(-5)) / e1.stderr_mean[-1]
    verdict(9, {"var_t5": (zv <= 3, f"{e0.var[-1]:.5f} ({zv:.2f} se)"),
                "mean_t5_u0=1": (zm <= 3, f"{e1.mean[-1]:.5f} ({zm:.2f} se)"),
                "runtime_s": (sec < 30.0, f"{sec:.1f}")})


def test_criterion_10_kinetics():
    kappa = 0.5
    nbar = planck_nbar(1.0, 1.0)
    runs = {lam: run_kinetics(rwa(1e-3, 2 / kappa, kappa=kappa, nbar=nbar, lam=lam), 1.0)
            for lam in (0.0, 1.0)}
    dev = max(s.max_deviation for s in runs.values())
    gap = float(np.abs(runs[0.0].n_flow - runs[1.0].n_flow).max())
    planck = abs(planck_nbar(log(2.0), 1.0) - 1)
    verdict(10, {"kinetic_law": (dev <= 5e-3, f"{dev:.2e}"),
                 "lambda_0_vs_1": (gap <= 1e-12, f"{gap:.2e}"),
                 "planck_ln2": (planck <= 1e-12, f"{planck:.1e}")})


def test_criterion_11_bogoliubov():
    res = [bogoliubov_checks(n) for n in (0.0, 0.5, 1.0, 5.0)]
    det = max(abs(r["det"] - 1) for r in res)
    vac = max(r["max_violation"] for r in res)
    verdict(11, {"det-1": (det <= 1e-12, f"{det:.1e}"),
                 "vacuum_annihilation": (vac <= 1e-12, f"{vac:.1e}")})


def test_criterion_12_determinism(tmp_path):
    runs = {"ou-mc": ["--set", "mc.n_traj=20000", "--set", "grid.t_max=1"],
            "ccr-decay": [], "kinetics-check": [], "xx-audit": [], "convergence": []}
    same = {}
    for exp_name, extra in runs.items():
        out = []
        for k in ("a", "b"):
            d = tmp_path / exp_name / k
            subprocess.run([sys.executable, "-m", "netfd.cli", exp_name, "--out", str(d), "--quiet",
                            *extra], check=True)
            out.append((d / f"{exp_name}.csv").read_bytes())
        same[exp_name] = out[0] == out[1]
    verdict(12, {k: (v, "identical" if v else "differs") for k, v in same.items()})


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q", "-s"]))
