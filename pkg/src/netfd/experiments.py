"""Named experiments: each maps an ExperimentConfig to a Report."""
from __future__ import annotations

from itertools import product as cartesian
from math import exp, sqrt

import numpy as np

from . import classical_ou as ou
from . import kinetics, rwa_model, xx_model
from .config import ExperimentConfig
from .emit import Check, Report
from .ito_core import TimeGrid, bogoliubov_checks
from .op_expansion import martingale_vacuum_check, tilde_conjugate

NO_RNG = "none"


def grid_of(cfg: ExperimentConfig, dt: float | None = None) -> TimeGrid:
    g = cfg["grid"]
    dt = g["dt"] if dt is None else dt
    if g["n_steps"]:
        return TimeGrid(dt, g["n_steps"])
    return TimeGrid.from_t_max(dt, g["t_max"])


def nbar_of(cfg: ExperimentConfig) -> float:
    m = cfg["model"]
    if m["T"] >= 0:
        return kinetics.planck_nbar(m["omega"], m["T"])
    return m["nbar"]


def rwa_params(cfg: ExperimentConfig, **kw) -> rwa_model.RwaParams:
    m = cfg["model"]
    base = dict(omega=m["omega"], kappa=m["kappa"], nbar=nbar_of(cfg), lam=m["lam"],
                nu=m["nu"], grid=grid_of(cfg))
    base.update(kw)
    return rwa_model.RwaParams(**base)


def xx_params(cfg: ExperimentConfig, **kw) -> xx_model.XxParams:
    m = cfg["model"]
    base = dict(m=m["m"], omega=m["omega"], kappa=m["kappa"], nbar=nbar_of(cfg),
                grid=grid_of(cfg))
    base.update(kw)
    return xx_model.XxParams(**base)


def _ccr_rows(tr: rwa_model.CcrTrace, gap=None):
    rows = []
    for j, (t, c, a) in enumerate(zip(tr.times, tr.values, tr.analytic)):
        row = [t, c.real, c.imag, a]
        if gap is not None:
            row.append(gap[j])
        rows.append(row)
    return rows


# --------------------------------------------------------------------------


def ccr_decay(cfg: ExperimentConfig) -> Report:
    p = rwa_params(cfg, lam=1.0)
    tr = rwa_model.ccr_trace(p, noise=False)
    err = abs(tr.final - exp(-2 * p.kappa * p.grid.t_max))
    rep = Report("ccr-decay", ["t", "re_c", "im_c", "analytic"], _ccr_rows(tr), summary=err)
    rep.checks.append(Check.at_most("final_vs_exp", err, cfg["tol"]["decay"]))
    return rep


def ccr_restore(cfg: ExperimentConfig) -> Report:
    p = rwa_params(cfg, lam=1.0)
    tr = rwa_model.ccr_trace(p, noise=True)
    off = rwa_model.ccr_trace(p, noise=False)
    gap = (tr.values - off.values).real
    err = float(np.abs(tr.values - 1).max())
    rep = Report("ccr-restore", ["t", "re_c", "im_c", "analytic_decay", "noise_gap"],
                 _ccr_rows(tr, gap), summary=err)
    rep.checks.append(Check.at_most("max_abs_c_minus_1", err, cfg["tol"]["restore"]))
    return rep


def rwa_run(cfg: ExperimentConfig) -> Report:
    p = rwa_params(cfg)
    tr = rwa_model.ccr_trace(p, noise=True)
    err = float(np.abs(tr.values - 1).max())
    rep = Report("rwa-run", ["t", "re_c", "im_c", "analytic_decay"], _ccr_rows(tr), summary=err)
    rep.checks.append(Check.at_most("ccr_over_dt", err / p.grid.dt, cfg["tol"]["ccr_c"]))
    return rep


def lambda_sweep(cfg: ExperimentConfig) -> Report:
    lams = [float(v) for v in cfg["model"]["lams"]]
    if not lams:
        raise ValueError("model.lams must not be empty")
    p = rwa_params(cfg)
    inv = rwa_model.lambda_invariance_of_bra_dynamics(lams, p)
    tol = cfg["tol"]
    rep = Report("lambda-sweep", ["lambda", "max_ccr_error", "ccr_over_dt"])
    worst = 0.0
    for lam in lams:
        err = float(np.abs(rwa_model.ccr_trace(p.with_(lam=lam)).values - 1).max())
        worst = max(worst, err / p.grid.dt)
        rep.rows.append([lam, err, err / p.grid.dt])
    rep.summary = inv["max_deviation"]
    rep.checks += [
        Check.at_most("bra_projection_deviation", inv["max_deviation"], tol["identity"]),
        Check.at_most("projected_recursion", inv["recursion_residual"], tol["identity"]),
        Check.at_most("ccr_over_dt", worst, tol["ccr_c"]),
    ]
    return rep


def identity_audit(cfg: ExperimentConfig) -> Report:
    """All RWA-model operator identities with default grids of parameters."""
    base = rwa_params(cfg)
    tol = cfg["tol"]["identity"]
    rows: list[tuple[str, float]] = []

    worst_nc = worst_fd = worst_vac = worst_td = worst_ito = 0.0
    for kappa, nbar, nu in cartesian((0.1, 0.5, 1.3), (0.0, 0.5, 2.0), (0.0, 0.5, 1.0)):
        p = base.with_(kappa=kappa, nbar=nbar, nu=nu)
        for lam in (0.0, 0.5, 1.0):
            r = rwa_model.martingale_identities(lam, p)
            worst_nc = max(worst_nc, r["non_commutativity"])
            worst_fd = max(worst_fd, r["fluctuation_dissipation"])
            dM = rwa_model.build_martingale_rwa(lam, 0, p)[2]
            worst_vac = max(worst_vac, abs(martingale_vacuum_check(dM, p.tables)))
            idM = dM * 1j
            worst_td = max(worst_td, idM.residual(tilde_conjugate(idM)))
            D1, N1 = rwa_model.langevin_matrices(p.with_(lam=lam))
            D2, N2 = rwa_model.ito_formula_matrices(p.with_(lam=lam))
            worst_ito = max(worst_ito, float(np.abs(D1 - D2).max()), float(np.abs(N1 - N2).max()))
    rows += [("non_commutativity", worst_nc), ("lambda_fluctuation_dissipation", worst_fd),
             ("martingale_vacuum_mean", worst_vac), ("martingale_tildian", worst_td),
             ("ito_formula_vs_langevin", worst_ito)]

    disp = rwa_model.martingale_display_residuals(base.with_(nu=1.0))
    disp_any = rwa_model.martingale_display_residuals(base)
    rows += [("lambda1_display", max(disp["lambda1_exact"], disp_any["lambda1_exact"])),
             ("lambda0_display_nu1", disp["lambda0_exact"]),
             ("lambda0_display_projected", disp_any["lambda0_projected"])]

    io = 0.0
    for lam in (0.0, 0.37, 1.0):
        io = max(io, float(rwa_model.input_output_trace(base.with_(lam=lam)).max()))
    rows.append(("input_output", io))

    rows.append(("hermitian_at_lambda1", rwa_model.hermiticity_residual(base.with_(lam=1.0))["total"]))
    rows.append(("bra_conservation", rwa_model.bra_conservation(base)))

    bog = 0.0
    for nbar in (0.0, 0.5, 1.0, 5.0):
        b = bogoliubov_checks(nbar)
        bog = max(bog, abs(b["det"] - 1.0), b["max_violation"])
    rows.append(("bogoliubov", bog))

    rep = Report("identity-audit", ["identity", "max_residual"], [list(r) for r in rows])
    rep.checks = [Check.at_most(name, v, tol) for name, v in rows]
    herm0 = rwa_model.hermiticity_residual(base.with_(lam=0.0))
    rep.extra["hermiticity_residual_lambda0"] = herm0["total"]
    rep.checks.append(Check.at_least("non_hermitian_at_lambda0", herm0["total"], tol))
    rep.summary = max(v for _, v in rows)
    return rep


def xx_run(cfg: ExperimentConfig) -> Report:
    p = xx_params(cfg)
    k = xx_model.bra_kramers(p)
    xp = xx_model.xp_ccr_trace(p)
    tol = cfg["tol"]
    cols = ["t", "re_xp", "im_xp", "x_residual", "p_residual", "a_residual"]
    rows = []
    for j, t in enumerate(p.grid.times):
        res = (k.x_residual[j - 1], k.p_residual[j - 1], k.a_residual[j - 1]) if j else (0, 0, 0)
        rows.append([t, xp[j].real, xp[j].imag, *res])
    ccr = float(np.abs(xp - 1j).max())
    rep = Report("xx-run", cols, rows, summary=k.max_residual)
    rep.checks += [Check.at_most("kramers_termwise", k.max_residual, tol["identity"]),
                   Check.at_most("xp_ccr_over_dt", ccr / p.grid.dt, tol["ccr_c"])]
    return rep


def xx_audit(cfg: ExperimentConfig) -> Report:
    base = xx_params(cfg)
    tol = cfg["tol"]["identity"]
    fd = vac = td = comm = strat = minus = unexplained = 0.0
    for m, omega, kappa, nbar in cartesian((0.5, 2.0), (0.7, 1.5), (0.1, 0.9), (0.0, 1.5)):
        p = base.with_(m=m, omega=omega, kappa=kappa, nbar=nbar)
        r = xx_model.martingale_report(p)
        fd, vac = max(fd, r["fluctuation_dissipation"]), max(vac, r["vacuum_mean"])
        td, comm = max(td, r["tildian"]), max(comm, r["commutativity"])
        s = xx_model.stratonovich_report(p)
        strat = max(strat, abs(s["stratonovich_pi_d"]), abs(s["stratonovich_pi_r"] - 1))
        minus = max(minus, abs(s["minus_pi_d"] + 1), abs(s["minus_pi_r"] - 1))
        unexplained = max(unexplained, xx_model.ito_formula_discrepancy(p)["unexplained"])
    rows = [("fluctuation_dissipation", fd), ("martingale_vacuum_mean", vac),
            ("martingale_tildian", td), ("martingale_commutativity", comm),
            ("stratonovich_no_pi_d", strat), ("minus_form", minus),
            ("ito_discrepancy_beyond_imaginary_term", unexplained),
            ("bra_projects_damping", xx_model.bra_projects_pi(base))]
    cmp = xx_model.rwa_coefficient_comparison(base)
    rep = Report("xx-audit", ["identity", "max_residual"], [list(r) for r in rows])
    rep.checks = [Check.at_most(n, v, tol) for n, v in rows]
    rep.checks.append(Check.at_most("rwa_noise_ratio", cmp["ratio"] - 1 / sqrt(2), tol))
    rep.extra["rwa_comparison"] = {k: v for k, v in cmp.items()}
    rep.summary = max(v for _, v in rows)
    return rep


def ou_mc(cfg: ExperimentConfig) -> Report:
    m = cfg["model"]
    p = ou.ClassicalParams(m=m["m"], gamma=m["gamma"], T=m["T"], grid=grid_of(cfg),
                           n_traj=cfg["mc"]["n_traj"], seed=cfg.seed)
    est = ou.mc_estimate(ou.simulate(p, m["u0"]))
    mean_a, var_a = ou.fp_moments_analytic(est.times, m["u0"], p)
    cols = ["t", "mean", "var", "stderr_mean", "stderr_var", "analytic_mean", "analytic_var"]
    rows = [list(r) for r in zip(est.times, est.mean, est.var, est.stderr_mean,
                                 est.stderr_var, mean_a, var_a)]
    k = cfg["tol"]["n_stderr"]
    dm, dv = abs(est.mean[-1] - mean_a[-1]), abs(est.var[-1] - var_a[-1])
    rep = Report("ou-mc", cols, rows, summary=dv)
    if p.T == 0:
        rep.checks.append(Check.at_most("zero_temperature_var", est.var.max(), 0.0))
        rep.checks.append(Check.at_most("zero_temperature_mean", dm, 1e-2 * abs(m["u0"]) + 1e-12))
    else:
        rep.checks.append(Check.at_most("final_var_in_stderr", dv / est.stderr_var[-1], k))
        rep.checks.append(Check.at_most("final_mean_in_stderr", dm / est.stderr_mean[-1], k))
    return rep


def kinetics_check(cfg: ExperimentConfig) -> Report:
    p = rwa_params(cfg)
    s = kinetics.run_kinetics(p, cfg["model"]["n0"])
    rows = [list(r) for r in zip(s.times, s.n_flow, s.n_kinetic, s.deviation)]
    rep = Report("kinetics-check", ["t", "n_flow", "n_kinetic", "deviation"], rows,
                 summary=s.max_deviation)
    rep.checks.append(Check.at_most("max_deviation", s.max_deviation, cfg["tol"]["kinetics"]))
    return rep


def convergence(cfg: ExperimentConfig) -> Report:
    """Halve dt three times; CCR and kinetic errors should halve with it."""
    dt0 = cfg["grid"]["dt"]
    dts = [dt0, dt0 / 2, dt0 / 4]
    ccr, kin = [], []
    for dt in dts:
        p = rwa_params(cfg, grid=grid_of(cfg, dt))
        ccr.append(float(np.abs(rwa_model.ccr_trace(p).values - 1).max()))
        kin.append(kinetics.run_kinetics(p, cfg["model"]["n0"]).max_deviation)
    rows = []
    for i, dt in enumerate(dts):
        r1 = ccr[i - 1] / ccr[i] if i else float("nan")
        r2 = kin[i - 1] / kin[i] if i else float("nan")
        rows.append([dt, ccr[i], kin[i], r1, r2])
    rep = Report("convergence", ["dt", "ccr_error", "kinetics_error", "ccr_ratio",
                                 "kinetics_ratio"], rows, summary=ccr[-1])
    lo, hi = cfg["tol"]["order_low"], cfg["tol"]["order_high"]
    for i in (1, 2):
        rep.checks.append(Check.within(f"ccr_ratio_{i}", rows[i][3], lo, hi))
        rep.checks.append(Check.within(f"kinetics_ratio_{i}", rows[i][4], lo, hi))
    return rep


RUNNERS = {
    "ccr-decay": ccr_decay, "ccr-restore": ccr_restore, "rwa-run": rwa_run,
    "lambda-sweep": lambda_sweep, "identity-audit": identity_audit, "xx-run": xx_run,
    "xx-audit": xx_audit, "ou-mc": ou_mc, "kinetics-check": kinetics_check,
    "convergence": convergence,
}


def generator_of(experiment: str) -> str:
    return ou.GENERATOR if experiment == "ou-mc" else NO_RNG


def run(cfg: ExperimentConfig) -> Report:
    return RUNNERS[cfg.experiment](cfg)
