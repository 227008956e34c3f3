"""The full battery of numerical checks, shared by ``dqg verify`` and the tests."""
import logging
import math

import numpy as np

from .config import InitialDataSpec, SimConfig
from .diagnostics import (
    InequalityReport,
    besov_functional_J,
    check_uniqueness_exponents,
    compute_exponents,
    constants_stable,
    distinguished_uniqueness_pair,
    energy_ledger,
    lemma1_ensemble,
    max_principle_check,
    scaling_symmetry_check,
    shell_inequality_check,
)
from .evolution import run
from .initial_data import generate_initial_data
from .littlewood_paley import build_filter_bank, decompose, padded_product, paraproduct_split, product_shell
from .spectral import GridSpec, dealias, l2_norm, resample, single_mode, spectral_from_values

log = logging.getLogger(__name__)


def _structural(name, residual, tol, **params):
    rep = InequalityReport(name, dict(params, tol=tol))
    rep.measured_constant = float(residual)
    rep.passed = bool(residual <= tol)
    return rep


def random_field(grid, rng, band_limited=True):
    f = spectral_from_values(grid, rng.standard_normal((grid.n, grid.n)))
    return dealias(f) if band_limited else f


def check_filter_bank(sizes=(32, 64, 128), seed=0, tol=1e-12):
    rng = np.random.default_rng(seed)
    worst_pou = worst_rec = 0.0
    for n in sizes:
        grid = GridSpec(n)
        bank = build_filter_bank(grid)
        total = bank.partition_sum()
        nz = grid.kmag > 0
        worst_pou = max(worst_pou, float(np.max(np.abs(total[nz] - 1.0))))
        f = random_field(grid, rng, band_limited=False)
        rec = decompose(f, bank).reconstruct(grid)
        worst_rec = max(worst_rec, l2_norm(rec - f) / l2_norm(f))
    rep = _structural("filter_bank", max(worst_pou, worst_rec), tol, sizes=list(sizes))
    rep.parameters.update(partition_residual=worst_pou, reconstruction_residual=worst_rec)
    return rep


def check_paraproduct(pairs=50, n=64, seed=1, tol=1e-12):
    """Relative residual of hh + hl + lh against P_k(f g) over all shells.

    Shells where P_k(f g) vanishes identically (below 1e-13 ||f g||) are held
    to an absolute bound 1e-13 ||f g|| instead.
    """
    rng = np.random.default_rng(seed)
    grid = GridSpec(n)
    pbank = build_filter_bank(GridSpec(2 * n))
    worst = 0.0
    worst_empty = 0.0
    for _ in range(pairs):
        f, g = random_field(grid, rng), random_field(grid, rng)
        scale = l2_norm(padded_product(f, g))
        for k in pbank.shells:
            hh, hl, lh = paraproduct_split(f, g, k)
            ref = product_shell(f, g, k)
            err = l2_norm(hh + hl + lh - ref)
            rn = l2_norm(ref)
            if rn > 1e-13 * scale:
                worst = max(worst, err / rn)
            else:
                worst_empty = max(worst_empty, err / scale)
    rep = _structural("paraproduct_identity", worst, tol, pairs=pairs, n=n)
    rep.parameters["empty_shell_residual"] = worst_empty
    rep.passed = rep.passed and worst_empty <= 1e-13
    return rep


def check_exact_solution(alphas=(0.6, 0.75, 0.9), kappa=1.0, T=1.0, n=64, dt=2.5e-3, tol=1e-8):
    worst = 0.0
    for a in alphas:
        cfg = SimConfig(alpha=a, kappa=kappa, n=n, t_end=T, dt_policy="fixed", dt=dt,
                        diagnostic_stride=10 ** 9,
                        initial_data=InitialDataSpec(kind="single_mode"))
        fin, _ = run(cfg)
        exact = single_mode(cfg.grid, 1, 0) * math.exp(-kappa * T)
        worst = max(worst, l2_norm(fin.theta - exact))
    return _structural("exact_solution", worst, tol, alphas=list(alphas), T=T)


def evolution_checks(cfg, mp_tol=1e-4, ledger_tol=1e-5):
    """Max principle for p in {2, p_crit, 4}, energy ledger and J boundedness."""
    ex = compute_exponents(cfg.alpha)
    _, series = run(cfg)
    out = []
    for p in series.p_values:
        out.append((f"max_principle_p{p:g}", max_principle_check(series, p, mp_tol)))
    out.append(("energy_ledger", energy_ledger(series, cfg.kappa, ledger_tol)))
    _, jrep = besov_functional_J(series, ex)
    out.append(("besov_functional", jrep))
    return out, series


def kappa_trend(cfg, kappas=(0.5, 1.0, 2.0)):
    """Measured C* of the Besov functional for several kappa (recorded, not asserted)."""
    rep = InequalityReport("besov_kappa_trend", {"alpha": cfg.alpha, "kappas": list(kappas)})
    ex = compute_exponents(cfg.alpha)
    ok = True
    for kap in kappas:
        _, series = run(cfg.with_(kappa=kap))
        _, jr = besov_functional_J(series, ex)
        rep.add(kap, None, jr.measured_constant, 1.0)
        rep.parameters[f"C_kappa_{kap:g}"] = jr.measured_constant
        ok = ok and jr.passed
    rep.passed = ok
    rep.measured_constant = max((s["lhs"] for s in rep.samples), default=0.0)
    return rep


def check_lemma1(alpha, samples=100, n_lo=64, seed=2, factor=2.0):
    """Max transport-bound ratio over a random ensemble at n and 2n."""
    ex = compute_exponents(alpha)
    grid = GridSpec(n_lo)
    fields = []
    for s in range(samples):
        spec = InitialDataSpec(k_lo=1, k_hi=n_lo // 4, seed=seed * 100003 + s, normalize="none")
        fields.append(generate_initial_data(spec, grid, alpha))
    lo = lemma1_ensemble(fields, ex.s0, ex.lemma_p, ex.lemma_q)
    hi = lemma1_ensemble([resample(f, 2 * n_lo) for f in fields], ex.s0, ex.lemma_p, ex.lemma_q)
    rep = InequalityReport("lemma1_stability", {"alpha": alpha, "samples": samples,
                                                "s": ex.s0, "p": ex.lemma_p, "q": ex.lemma_q,
                                                "C_lo": lo.measured_constant,
                                                "C_hi": hi.measured_constant})
    rep.measured_constant = hi.measured_constant
    rep.passed = (lo.passed and hi.passed and np.isfinite(lo.measured_constant)
                  and constants_stable(lo.measured_constant, hi.measured_constant, factor))
    return rep


def check_shell_inequality(cfg, n_lo=64, T=1.0, dt=2.5e-3, sample_dt=1e-2, factor=2.0):
    """Measured constant of the shell inequality under dt halving and n doubling."""
    ex = compute_exponents(cfg.alpha)
    consts = {}
    negative = 0
    for n, step in ((n_lo, dt), (n_lo, dt / 2), (2 * n_lo, dt)):
        stride = max(1, round(sample_dt / step))
        c = cfg.with_(n=n, t_end=T, dt_policy="fixed", dt=step, diagnostic_stride=stride)
        _, _, snaps = run(c, keep_snapshots=True)
        r = shell_inequality_check(snaps, cfg.alpha, cfg.kappa, ex)
        consts[(n, step)] = r.measured_constant
        negative += r.parameters.get("negative_rhs", 0)
    base = consts[(n_lo, dt)]
    rep = InequalityReport("shell_inequality_stability", {
        "alpha": cfg.alpha, "T": T, "negative_rhs": negative,
        "C_base": base, "C_dt_half": consts[(n_lo, dt / 2)], "C_n_double": consts[(2 * n_lo, dt)]})
    rep.measured_constant = base
    rep.passed = (negative == 0 and constants_stable(base, consts[(n_lo, dt / 2)], factor)
                  and constants_stable(base, consts[(2 * n_lo, dt)], factor))
    return rep


def check_scaling(cfg, n=256, T=0.5, k_hi=8, lam=2, tol=1e-6, tol_exact=1e-10):
    grid = GridSpec(n)
    c = cfg.with_(n=n, t_end=T)
    spec = InitialDataSpec(k_lo=1, k_hi=k_hi, seed=cfg.initial_data.seed,
                           target=cfg.initial_data.target)
    theta0 = generate_initial_data(spec, grid, cfg.alpha)
    smooth = scaling_symmetry_check(theta0, lam, c, tol=tol, conjugate_grids=False)
    exact = scaling_symmetry_check(single_mode(grid, 1, 0), lam, c, tol=tol_exact,
                                   conjugate_grids=False)
    rep = InequalityReport("scaling_symmetry", {"alpha": cfg.alpha, "n": n, "lambda": lam,
                                                "smooth_residual": smooth.measured_constant,
                                                "single_mode_residual": exact.measured_constant})
    rep.measured_constant = smooth.measured_constant
    rep.passed = smooth.passed and exact.passed
    return rep


def check_exponents(tol=1e-12):
    """Exponent table for alpha = 0.6, 0.75 against closed-form values."""
    expected = {
        0.6: dict(s0=0.8, p_crit=10.0, lemma_p=10.0, lemma_q=2.5, gamma=0.75, a=2.4, M=5.0),
        0.75: dict(s0=0.5, p_crit=4.0, lemma_p=4.0, lemma_q=4.0, gamma=None, a=None, M=2.0),
    }
    worst = 0.0
    ok = True
    for a, vals in expected.items():
        ex = compute_exponents(a)
        for k, v in vals.items():
            got = getattr(ex, k)
            if v is None:
                ok = ok and got is None
            else:
                worst = max(worst, abs(got - v))
        p, q = distinguished_uniqueness_pair(a)
        ok = ok and check_uniqueness_exponents(a, p, q)
    rep = _structural("exponent_table", worst, tol)
    rep.passed = rep.passed and ok
    return rep


def check_temporal_order(alpha=0.75, n=32, T=0.5, dts=(0.05, 0.025, 0.0125, 0.00625),
                         min_order=3.9, seed=3):
    """Observed order from successive step halvings (Richardson)."""
    finals = []
    for dt in dts:
        cfg = SimConfig(alpha=alpha, n=n, t_end=T, dt_policy="fixed", dt=dt,
                        diagnostic_stride=10 ** 9,
                        initial_data=InitialDataSpec(k_lo=1, k_hi=4, target=5.0, seed=seed))
        finals.append(run(cfg)[0].theta)
    diffs = [l2_norm(a - b) for a, b in zip(finals, finals[1:])]
    orders = [math.log2(d1 / d2) for d1, d2 in zip(diffs, diffs[1:])]
    rep = InequalityReport("temporal_order", {"alpha": alpha, "n": n, "dts": list(dts),
                                              "differences": diffs, "orders": orders,
                                              "min_order": min_order})
    rep.measured_constant = min(orders)
    rep.passed = min(orders) >= min_order
    return rep


def verify(cfg, fast=False):
    """Run every check for the configuration; returns ``[(label, report), ...]``.

    ``fast`` shrinks ensembles and grids for smoke testing.
    """
    reports = [("exponent_table", check_exponents()),
               ("filter_bank", check_filter_bank((32, 64) if fast else (32, 64, 128))),
               ("paraproduct_identity", check_paraproduct(5 if fast else 50)),
               ("exact_solution", check_exact_solution())]
    if cfg.out_of_hypothesis:
        log.warning("alpha=%s is outside (1/2, 1): estimate checks are observations only",
                    cfg.alpha)
        return reports
    evo, _ = evolution_checks(cfg)
    reports.extend(evo)
    if not fast:
        reports.append(("besov_kappa_trend", kappa_trend(cfg)))
    reports.append(("lemma1_stability", check_lemma1(cfg.alpha, 10 if fast else 100)))
    reports.append(("shell_inequality_stability",
                    check_shell_inequality(cfg, n_lo=32 if fast else 64, T=0.3 if fast else 1.0)))
    reports.append(("scaling_symmetry", check_scaling(cfg, n=64 if fast else 256,
                                                      k_hi=4 if fast else 8)))
    reports.append(("temporal_order", check_temporal_order(cfg.alpha)))
    return reports
