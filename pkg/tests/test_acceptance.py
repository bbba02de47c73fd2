"""Acceptance gate: one criterion per test, one printed verdict line each.

Verdict lines are echoed immediately and repeated in the terminal summary
(via conftest), so they survive output capture; each criterion still fails
loudly through an assert.
"""
import math

import numpy as np
import pytest
from scipy.stats import linregress

from bandlab.cluster import density, make_subspace, random_subspace
from bandlab.exponents import alpha, critical_p, sigma
from bandlab.experiments import SweepSpec, corollary_suite, run_sweep
from bandlab.kernels import (
    decompose_diagonal,
    periodized_diagonal_check,
    sphere_ft,
    sphere_ft_envelope,
)
from bandlab.lattice import (
    SpectralBand,
    TorusConfig,
    brute_force_band_oracle,
    enumerate_band,
    weyl_remainder,
)
from bandlab.mollifier import Mollifier
from bandlab.schatten import (
    dual_pairing_check,
    gram_matrix,
    random_test_function,
    schatten_norm,
)

TWO_PI = 2 * math.pi
MOLL = Mollifier()


def verdict(num, name, ok, detail):
    import conftest

    line = f"criterion {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line, flush=True)
    conftest.ACCEPTANCE_VERDICTS.append(line)
    assert ok, line


def _loglog_slope(xs, ys):
    fit = linregress(np.log(xs), np.log(ys))
    return fit.slope


def test_criterion_01_oracle_equality():
    mismatches = 0
    cases = 0
    for n in (2, 3):
        cfg = TorusConfig(n)
        for lam in (5.0, 10.0, 20.0, 40.0):
            for eps in (0.01, 0.1, 0.5, 1.0):
                band = SpectralBand(lam, eps)
                fast = {f.k for f in enumerate_band(cfg, band).freqs}
                slow = {f.k for f in brute_force_band_oracle(cfg, band).freqs}
                cases += 1
                if fast != slow:
                    mismatches += 1
    verdict(1, "oracle-equality", mismatches == 0,
            f"{cases} bands, {mismatches} mismatches")


SWEEP2 = run_sweep(SweepSpec(n=2, mode="counts", lam_min=10, lam_max=5000, points=20))


def test_criterion_02_count_scaling():
    slope2 = SWEEP2.count_fit.slope
    ratio_slope = SWEEP2.fit.slope
    res3 = run_sweep(SweepSpec(n=3, mode="counts", lam_min=10, lam_max=300, points=20))
    slope3 = res3.count_fit.slope
    ok = (abs(slope2 - 2 / 3) <= 0.1 and abs(ratio_slope) <= 0.05
          and abs(slope3 - 1.5) <= 0.1)
    verdict(2, "count-scaling", ok,
            f"n=2 slope {slope2:.4f} (want 2/3±0.1), ratio slope {ratio_slope:.4f} "
            f"(|.|<=0.05), n=3 slope {slope3:.4f} (want 1.5±0.1)")


def test_criterion_03_lower_bound():
    ratios = [r.ratio for r in SWEEP2.rows]
    c = min(ratios)
    slope = SWEEP2.fit.slope
    ok = c > 0 and abs(slope) <= 0.05
    verdict(3, "count-lower-bound", ok,
            f"fitted c = min ratio = {c:.4f} > 0, ratio slope {slope:.4f} (|.|<=0.05)")


def test_criterion_04_basis_independence():
    rng = np.random.default_rng(100)
    cfg = TorusConfig(2)
    worst = 0.0
    for trial in range(100):
        lam = float(rng.uniform(5, 30))
        eps = float(rng.uniform(0.2, 1.0))
        cluster = enumerate_band(cfg, SpectralBand(lam, eps))
        if cluster.N == 0:
            continue
        d = int(rng.integers(1, min(6, cluster.N) + 1))
        sub = random_subspace(cluster, d, seed=trial)
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        U, _ = np.linalg.qr(z)
        rotated = make_subspace(cluster, sub.B @ U)
        pts = rng.uniform(0, TWO_PI, size=(1000, 2))
        disc = float(np.max(np.abs(density(sub)(pts) - density(rotated)(pts))))
        worst = max(worst, disc)
    verdict(4, "basis-independence", worst <= 1e-10,
            f"100 trials, max pointwise discrepancy {worst:.2e} (<= 1e-10)")


def test_criterion_05_trace_identity():
    worst = 0.0
    for n in (2, 3):
        cfg = TorusConfig(n)
        for lam in (10.0, 20.0):
            cluster = enumerate_band(cfg, SpectralBand(lam, 0.5))
            for seed in range(50):
                h = random_test_function(n, seed)
                G = gram_matrix(cluster, h)
                expected = cluster.N * h.l2_norm_sq / TWO_PI**n
                rel = abs(schatten_norm(G, 1.0).value - expected) / expected
                worst = max(worst, rel)
    verdict(5, "trace-identity", worst <= 1e-10,
            f"200 (n,lam,h) cases, max rel err {worst:.2e} (<= 1e-10)")


def test_criterion_06_frequency_identity():
    mus = np.linspace(0.0, 60.0, 10)
    lams = np.linspace(5.0, 50.0, 10)
    epss = np.linspace(0.1, 1.0, 10)
    worst = max(
        MOLL.frequency_identity_check(float(mu), float(lam), float(eps))
        for mu in mus for lam in lams for eps in epss
    )
    verdict(6, "frequency-identity", worst <= 1e-6,
            f"1000-point (mu,lam,eps) grid, max discrepancy {worst:.2e} (<= 1e-6)")


def test_criterion_07_kernel_two_term():
    cfg = TorusConfig(2)
    lams = [50.0, 100.0, 200.0, 400.0]
    epss = [0.1, 0.2, 0.5]
    per_lam_max = []
    j_ok = True
    for lam in lams:
        best = 0.0
        for eps in epss:
            rep = decompose_diagonal(cfg, lam, eps, MOLL)
            best = max(best, rep.ratio_two_term)
            if rep.j_term > 1e-8 * eps * lam:
                j_ok = False
        per_lam_max.append(best)
    C = max(per_lam_max)
    slope = _loglog_slope(lams, per_lam_max)
    ok = j_ok and slope <= 0.1
    verdict(7, "kernel-two-term", ok,
            f"fitted C {C:.4f}, per-lambda max ratio slope {slope:.4f} (<= 0.1), "
            f"J bound {'held' if j_ok else 'violated'} at all 12 points")


def test_criterion_08_periodization():
    cfg = TorusConfig(2)
    worst = max(
        periodized_diagonal_check(cfg, lam, eps, MOLL).rel_discrepancy
        for lam in (10.0, 20.0, 50.0) for eps in (0.3, 0.5, 1.0)
    )
    gauss = max(
        periodized_diagonal_check(TorusConfig(n), 10.0, 0.5,
                                  gaussian_width=w).rel_discrepancy
        for n, w in [(2, 1.0), (3, 0.8)]
    )
    ok = worst <= 1e-4 and gauss <= 1e-10
    verdict(8, "periodization", ok,
            f"mollified max discrepancy {worst:.2e} (<= 1e-4), "
            f"gaussian self-test {gauss:.2e} (<= 1e-10)")


def test_criterion_09_sphere_ft():
    r = np.linspace(1e-3, 50.0, 4000)
    closed = 4 * math.pi * np.sin(r) / r
    ft_err = float(np.max(np.abs(sphere_ft(3, r) - closed)))
    # quadrature cross-check on a coarser set
    theta = np.linspace(0, math.pi, 20001)
    quad_err = 0.0
    for rv in (0.5, 5.0, 25.0, 50.0):
        direct = 2 * math.pi * np.trapezoid(
            np.exp(-1j * rv * np.cos(theta)) * np.sin(theta), theta)
        quad_err = max(quad_err, abs(sphere_ft(3, rv) - direct))
    env_max = 0.0
    for n in (2, 3, 4):
        rr = np.linspace(0.0, 500.0, 5000)
        env_max = max(env_max, float(np.max(
            np.abs(sphere_ft(n, rr)) * (1 + rr) ** ((n - 1) / 2))))
        # envelope representation reconstructs the transform
        rr = rr[rr > 0.3]
        rec = ((1 + rr) ** (-(n - 1) / 2)
               * 2 * np.real(sphere_ft_envelope(n, rr) * np.exp(1j * rr)))
        assert np.max(np.abs(rec - sphere_ft(n, rr))) < 1e-9
    ok = ft_err <= 1e-6 and quad_err <= 1e-6 and math.isfinite(env_max)
    verdict(9, "sphere-ft", ok,
            f"closed-form err {ft_err:.2e}, quadrature err {quad_err:.2e} (<= 1e-6), "
            f"envelope sup {env_max:.2f} finite for n in 2..4, r <= 500")


def test_criterion_10_critical_schatten():
    res = run_sweep(SweepSpec(n=2, mode="schatten", lam_min=10, lam_max=80,
                              points=4, eps_rule="fixed", eps_value=1.0,
                              trials=20, seed=0))
    lams = [r.lam for r in res.rows]
    ratios = [r.ratio for r in res.rows]
    slope = _loglog_slope(lams, ratios)
    ok = abs(slope) <= 0.1
    verdict(10, "critical-schatten", ok,
            f"alpha=3 ratio slope {slope:.4f} over lambda in 10..80 "
            f"(|.|<=0.1), fitted C {max(ratios):.4f}")


def test_criterion_11_duality_pairing():
    cfg = TorusConfig(2)
    cluster = enumerate_band(cfg, SpectralBand(10.0, 0.5))
    rng = np.random.default_rng(7)
    min_slack = math.inf
    for trial in range(100):
        d = int(rng.integers(1, 7))
        sub = random_subspace(cluster, d, seed=500 + trial)
        zeta = rng.standard_normal(d)
        h = random_test_function(2, 900 + trial)
        a = float(rng.uniform(1.0, 4.0))
        min_slack = min(min_slack, dual_pairing_check(sub, zeta, h, a))
    h = random_test_function(2, 42)
    G = gram_matrix(cluster, h)
    v = np.linalg.eigh(G.G)[1][:, -1:]
    sub = make_subspace(cluster, np.conj(v))
    aligned = dual_pairing_check(sub, np.array([1.0]), h, 1.0)
    rhs = schatten_norm(G, math.inf).value
    ok = min_slack >= -1e-9 and abs(aligned) <= 1e-6 * rhs
    verdict(11, "duality-pairing", ok,
            f"100 trials min slack {min_slack:.2e} (>= -1e-9), "
            f"aligned slack {abs(aligned):.2e} <= 1e-6*RHS={1e-6 * rhs:.2e}")


def test_criterion_12_corollary_suite():
    res = corollary_suite(2, [6.0, 12.0, math.inf], 20, 80,
                          points=3, seed=0, trials=8)
    details = []
    ok = True
    for p, fit in sorted(res.fits_by_p.items(), key=lambda kv: kv[0]):
        good = math.isfinite(fit.C) and fit.C > 0 and fit.slope <= 0.1
        ok = ok and good
        details.append(f"p={p:g}: C={fit.C:.3f} slope={fit.slope:.3f}")
    # branch continuity of the exponents at p_c, n = 2..8
    worst = 0.0
    for n in range(2, 9):
        pc = critical_p(n)
        s_lo = (n - 1) / 2 * (0.5 - 1.0 / pc)
        s_hi = n * (0.5 - 1.0 / pc) - 0.5
        a_lo = 2 * pc / (pc + 2)
        a_hi = pc * (n - 1) / (2 * n)
        worst = max(worst, abs(s_lo - s_hi), abs(a_lo - a_hi),
                    abs(sigma(n, pc) - s_lo), abs(alpha(n, pc) - a_lo))
    ok = ok and worst <= 1e-14
    verdict(12, "corollary-suite", ok,
            "; ".join(details) + f"; branch gap {worst:.1e} (<= 1e-14)")


def test_criterion_13_weyl_remainder():
    cfg = TorusConfig(2)
    rs = np.geomspace(10.0, 2000.0, 25)
    C = max(abs(weyl_remainder(cfg, float(r))) / r for r in rs)
    ok = math.isfinite(C) and C > 0
    verdict(13, "weyl-remainder", ok,
            f"fitted C = max |remainder|/r = {C:.4f} over r in [10, 2000]")
