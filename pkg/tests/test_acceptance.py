"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run `pytest tests/test_acceptance.py -v -s` to see the lines.  The two heavy
fixtures (500 matrices at N=400 for the bound certificates, and 100 full
minor towers at N=50 for interlacing) are session-scoped; the whole module
takes a few minutes on two cores.
"""

import json
import math
import os
import time

import numpy as np
import pytest

from guegaps.cli import main as cli_main
from guegaps.eigen import hermitian_eigenvalues
from guegaps.experiments import ExperimentConfig, gt_experiment, run_verification
from guegaps.gaudin_mehta import _determinant, fredholm_E, gap_cdf, gm_mean
from guegaps.logconcave import (
    EmpiricalSample,
    call_option_integral,
    logconcavity_diagnostic,
    put_option_integral,
)
from guegaps.sampler import SeedSpec, principal_minor, sample_gue
from guegaps.semicircle import sc_cdf, sc_density, sc_quantile

MASTER_SEED = 20260810
THREADS = max(1, min(4, os.cpu_count() or 1))


def _record(name: str, ok: bool, detail: str):
    print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="session")
def big_run():
    cfg = ExperimentConfig(
        n=400,
        num_matrices=500,
        master_seed=MASTER_SEED,
        delta=0.3,
        m_list=(2, 8, 32),
        h_grid=(0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0),
        t_grid=(1.0, 2.0, 3.0),
        p_list=(2, 3, 4),
    )
    t0 = time.perf_counter()
    report, result = run_verification(cfg, threads=THREADS)
    wall = time.perf_counter() - t0
    return report, result, wall


@pytest.fixture(scope="session")
def gt_run():
    cfg = ExperimentConfig(n=50, num_matrices=100, master_seed=MASTER_SEED, m_list=(2,))
    t0 = time.perf_counter()
    section = gt_experiment(cfg, threads=THREADS)
    wall = time.perf_counter() - t0
    return section, wall


def test_ac01_semicircle_roundtrip():
    t0 = time.perf_counter()
    worst = max(
        abs(sc_cdf(sc_quantile(p)) - p) for p in np.arange(0.01, 1.0, 0.01)
    )
    # Gauss-Legendre after x = sin(theta), which removes the edge singularity
    t, w = np.polynomial.legendre.leggauss(200)
    theta = 0.5 * np.pi * t
    dens = np.array([sc_density(float(x)) for x in np.sin(theta)])
    total = float(np.sum(0.5 * np.pi * w * dens * np.cos(theta)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and abs(total - 1.0) <= 1e-12 and elapsed < 1.0
    _record(
        "AC-1 semicircle round-trip",
        ok,
        f"max |F(Q(p))-p| = {worst:.2e}, integral = {total:.15f}, {elapsed:.3f}s",
    )


def test_ac02_eigensolver_identities():
    t0 = time.perf_counter()
    sizes = [10] * 34 + [50] * 33 + [200] * 33
    worst_tr = worst_tr2 = worst_int = 0.0
    for task, n in enumerate(sizes):
        m = sample_gue(n, SeedSpec(MASTER_SEED + 1, task))
        vals = hermitian_eigenvalues(m).values
        tr = m.trace()
        tr2 = float(np.trace(m.entries @ m.entries).real)
        worst_tr = max(worst_tr, abs(vals.sum() - tr) / (1.0 + abs(tr)))
        worst_tr2 = max(worst_tr2, abs((vals**2).sum() - tr2) / (1.0 + tr2))
        inner = hermitian_eigenvalues(principal_minor(m, n - 1)).values
        radius = float(np.max(np.abs(vals)))
        excess = max(
            float(np.max(vals[: n - 1] - inner, initial=0.0)),
            float(np.max(inner - vals[1:], initial=0.0)),
        )
        worst_int = max(worst_int, excess / radius)
    elapsed = time.perf_counter() - t0
    ok = worst_tr <= 1e-10 and worst_tr2 <= 1e-10 and worst_int <= 1e-9 and elapsed < 120
    _record(
        "AC-2 eigensolver identities",
        ok,
        f"100 matrices; worst trace {worst_tr:.2e}, trace-sq {worst_tr2:.2e}, "
        f"interlacing excess {worst_int:.2e} of radius, {elapsed:.1f}s",
    )


def test_ac03_fredholm_small_s():
    t0 = time.perf_counter()
    e_small = fredholm_E(0.1, nodes=30).e_value
    doubling = abs(_determinant(2.0, 20) - _determinant(2.0, 40))
    elapsed = time.perf_counter() - t0
    ok = abs(e_small - 0.9000274) <= 1e-6 and doubling < 1e-10 and elapsed < 5.0
    _record(
        "AC-3 Fredholm small-s",
        ok,
        f"E(0.1) = {e_small:.9f} (series 0.9000274), doubling delta {doubling:.1e}, "
        f"{elapsed:.2f}s",
    )


def test_ac04_gm_normalization():
    t0 = time.perf_counter()
    mean = gm_mean()
    f10 = gap_cdf(10.0)
    f0 = gap_cdf(0.0)
    elapsed = time.perf_counter() - t0
    ok = abs(mean - 1.0) <= 1e-4 and abs(f10 - 1.0) <= 1e-6 and f0 == 0.0 and elapsed < 30
    _record(
        "AC-4 GM normalization",
        ok,
        f"mean = {mean:.7f}, F(10) = {f10:.8f}, F(0) = {f0}, {elapsed:.1f}s",
    )


def test_ac05_mean_gap(big_run):
    report, result, wall = big_run
    mean = report.thm_main.mean_gap
    ok = abs(mean - 1.0) <= 0.02 and wall < 900
    _record(
        "AC-5 mean gap",
        ok,
        f"N=400, 500 matrices, {result.observations.values.size} pooled gaps; "
        f"mean = {mean:.6f} (block stderr {report.mean_gap_block_stderr:.1e}), "
        f"run {wall:.0f}s on {THREADS} threads",
    )


def test_ac06_upper_tail(big_run):
    report, _, _ = big_run
    rows = [r for r in report.thm_main.upper_tail if r.param in (1.0, 2.0, 3.0, 4.0)]
    assert len(rows) == 4
    ok = all(r.passed for r in rows)
    detail = "; ".join(
        f"h={r.param:g}: {r.empirical_value:.2e} <= {r.bound_value:.2e}+3se" for r in rows
    )
    _record("AC-6 upper tail", ok, detail)


def test_ac07_lower_tail(big_run):
    report, _, _ = big_run
    rows = [r for r in report.thm_main.lower_tail if r.param in (0.1, 0.25, 0.5)]
    assert len(rows) == 3
    ok = all(r.passed for r in rows)
    detail = "; ".join(
        f"h={r.param:g}: {r.empirical_value:.2e} <= {r.bound_value:.2g}+3se" for r in rows
    )
    _record("AC-7 lower tail", ok, detail)


def test_ac08_gruenbaum(big_run):
    report, _, _ = big_run
    r = report.thm_main.gruenbaum
    ok = r.passed
    _record(
        "AC-8 Gruenbaum",
        ok,
        f"P(g >= mean) = {r.empirical_value:.4f} >= 1/e - 3se = "
        f"{r.bound_value - 3 * r.mc_stderr:.4f}",
    )


def test_ac09_moments(big_run):
    report, _, _ = big_run
    rows = report.thm_main.moments
    assert [r.param for r in rows] == [2, 3, 4]
    ok = all(r.passed for r in rows)
    detail = "; ".join(f"E[g^{r.param:g}] = {r.empirical_value:.3f} <= {r.bound_value:g}" for r in rows)
    _record("AC-9 moments", ok, detail)


def test_ac10_rigidity(big_run):
    report, _, _ = big_run
    sigma = report.rigidity.sigma_hats
    ok = set(report.rigidity.reports) == {2, 8, 32}
    details = []
    for m in (2, 8, 32):
        for r in report.rigidity.reports[m]:
            ok &= r.passed
        details.append(f"m={m}: sigma={sigma[m]:.3f}")
    sig_vals = [sigma[m] for m in (2, 8, 32)]
    ok &= sig_vals == sorted(sig_vals)  # variance grows with window size
    _record(
        "AC-10 rigidity tails",
        ok,
        "all P(|X|>t) <= e^(1-t)+3se for t in {1,2,3}; " + ", ".join(details),
    )


def test_ac11_logconcavity_diagnostics(big_run):
    _, result, _ = big_run
    rng = np.random.default_rng(42)
    exp_vals = rng.exponential(1.0, 100_000)
    rng = np.random.default_rng(43)
    n_mix = 10_200
    k = rng.binomial(n_mix, 0.5)
    mix_vals = np.concatenate([rng.normal(0.0, 1.0, k), rng.normal(6.0, 1.0, n_mix - k)])

    t0 = time.perf_counter()
    rep_exp = logconcavity_diagnostic(EmpiricalSample(exp_vals))
    rep_gue = logconcavity_diagnostic(EmpiricalSample(result.observations.values))
    rep_mix = logconcavity_diagnostic(EmpiricalSample(mix_vals))
    elapsed = time.perf_counter() - t0

    ok = rep_exp.consistent and rep_gue.consistent and not rep_mix.consistent and elapsed < 10
    _record(
        "AC-11 log-concavity diagnostics",
        ok,
        f"exp(1e5): {rep_exp.verdict}; GUE pooled: {rep_gue.verdict}; "
        f"6-sigma mixture: {rep_mix.verdict}; {elapsed:.2f}s",
    )


def test_ac12_gm_convergence(big_run):
    report, _, _ = big_run
    ok = report.ks_to_gm <= 0.02
    _record("AC-12 GM convergence", ok, f"KS = {report.ks_to_gm:.5f} <= 0.02")


def test_ac13_gt_interlacing(gt_run):
    section, wall = gt_run
    ok = len(section.violations) == 0 and section.pass_rate == 1.0 and wall < 300
    _record(
        "AC-13 GT interlacing",
        ok,
        f"100 matrices at N=50, {section.num_checks} pairs, "
        f"{len(section.violations)} violations, {wall:.0f}s",
    )


def test_ac14_convex_order_integrals():
    t0 = time.perf_counter()
    hs = np.linspace(0.01, 10.0, 1000)
    worst = max(abs(call_option_integral(float(h)) - math.exp(1.0 - h)) for h in hs)
    put_ok = all(put_option_integral(float(h)) <= 2.0 * h + 1e-14 for h in hs)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and put_ok and elapsed < 1.0
    _record(
        "AC-14 convex-order integrals",
        ok,
        f"1000 h values; max |call - e^(1-h)| = {worst:.1e}, put <= 2h: {put_ok}, "
        f"{elapsed:.2f}s",
    )


def test_ac15_reproducibility(tmp_path, capsys):
    cfg = {
        "n": 50,
        "num_matrices": 8,
        "delta": 0.3,
        "master_seed": 123,
        "m_list": [2],
        "h_grid": [0.5, 1.0, 2.0],
        "t_grid": [1.0, 2.0],
        "p_list": [2, 3],
        "out_dir": str(tmp_path / "run_t1"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    code1 = cli_main(["verify", "--config", str(cfg_path), "--threads", "1"])
    code2 = cli_main(
        ["verify", "--config", str(cfg_path), "--threads", "2", "--out", str(tmp_path / "run_t2")]
    )
    capsys.readouterr()
    identical = all(
        (tmp_path / "run_t1" / name).read_bytes() == (tmp_path / "run_t2" / name).read_bytes()
        for name in ("bounds.csv", "gaps.csv")
    )
    ok = code1 == 0 and code2 == 0 and identical
    _record(
        "AC-15 reproducibility",
        ok,
        f"exit codes ({code1}, {code2}); bounds.csv and gaps.csv byte-identical "
        f"across --threads 1 vs 2: {identical}",
    )
