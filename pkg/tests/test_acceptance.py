"""Acceptance criteria, each at its stated tolerance.

Every test records a one-line PASS/FAIL summary, listed together in the
"acceptance criteria" section of the pytest terminal summary.
"""
import time

import numpy as np
import pytest

from manifold_scattering import cli
from manifold_scattering.analysis import (
    CERTIFIED_CONSTANT, bandlimited_family, boundedness_ratio, chart_constants_circle,
    cz_decompose, cz_instance, empirical_constant, frame_identity_error,
    isometry_invariance_report, nonexpansive_ratio, random_bandlimited, rotation,
    stability_curve, torus_swap, torus_translation,
)
from manifold_scattering.filters import build_wavelet_bank
from manifold_scattering.scattering import moments
from manifold_scattering.spectra import TWO_PI, build_circle_spectrum, build_pointcloud_spectrum
from manifold_scattering.transform import Signal, decay_constant


def test_c01_frame_identity(circle, expo, acceptance):
    start = time.perf_counter()
    bank = build_wavelet_bank(expo, circle, -20, 20)
    fam = bandlimited_family(circle, 5.0, 50, seed=101)
    worst = max(frame_identity_error(f, bank) for f in fam)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-5 and elapsed < 10
    acceptance(1, ok, f"frame identity max rel error {worst:.2e} (< 1e-5), {elapsed:.2f}s (< 10s)")
    assert worst < 1e-5
    assert elapsed < 10


def test_c02_telescoping(circle, expo, acceptance):
    lam = circle.eigenvalues
    worst = 0.0
    for J in (5, 10, 20):
        bank = build_wavelet_bank(expo, circle, -J, J)
        partial = np.sum(bank.coefficients ** 2, axis=0)
        closed = np.exp(-2 * 2.0 ** (-J - 1) * lam) - np.exp(-2 * 2.0 ** J * lam)
        worst = max(worst, float(np.max(np.abs(partial - closed))))
    acceptance(2, worst <= 1e-12, f"telescoping max abs error {worst:.2e} (<= 1e-12), J in 5,10,20")
    assert worst <= 1e-12


def test_c03_nonexpansive(circle, bank8, acceptance):
    start = time.perf_counter()
    fam = bandlimited_family(circle, np.inf, 200, seed=303)
    worst = {}
    for m in (1, 2, 3):
        worst[m] = max(nonexpansive_ratio(fam[2 * i], fam[2 * i + 1], bank8, m) for i in range(100))
    elapsed = time.perf_counter() - start
    ok = all(v <= 1 + 1e-6 for v in worst.values()) and elapsed < 60
    detail = ", ".join(f"m={m} ratio {v:.4f}" for m, v in worst.items())
    acceptance(3, ok, f"nonexpansive {detail} (<= 1 + 1e-6), {elapsed:.1f}s (< 60s)")
    assert ok


def test_c04_q_boundedness(circle, bank8, acceptance):
    fam = bandlimited_family(circle, 5.0, 128, seed=404)
    changes = {}
    for q in (1.25, 1.5):
        for m in (1, 2):
            c = empirical_constant(fam, lambda f: boundedness_ratio(f, bank8, m, q))
            assert c["finite"]
            changes[(q, m)] = c["relative_change"]
    worst = max(changes.values())
    acceptance(4, worst < 0.1, f"q-boundedness max change on doubling {worst:.3f} (< 0.1)")
    assert worst < 0.1


def test_c05_isometry_invariance(circle, torus, expo, bank8, acceptance):
    rng = np.random.default_rng(505)
    worst = 0.0
    f = random_bandlimited(circle, np.inf, rng)
    for shift in (1, 37, 128):
        xi = rotation(TWO_PI * shift / circle.n_nodes)
        for m in (1, 2, 3):
            for q in (1.25, 1.5, 2.0):
                worst = max(worst, isometry_invariance_report(f, bank8, m, q, xi)["max_rel"])
    tbank = build_wavelet_bank(expo, torus, -6, 6)
    g = random_bandlimited(torus, np.inf, rng)
    n = torus.params["n_nodes_per_axis"]
    for xi in (torus_translation(TWO_PI * 5 / n, TWO_PI * 11 / n), torus_swap()):
        for m in (1, 2, 3):
            for q in (1.25, 1.5, 2.0):
                worst = max(worst, isometry_invariance_report(g, tbank, m, q, xi)["max_rel"])
    acceptance(5, worst <= 1e-8, f"isometry invariance max rel deviation {worst:.2e} (<= 1e-8)")
    assert worst <= 1e-8


def test_c06_diffeomorphism_stability(circle, bank8, acceptance):
    f = random_bandlimited(circle, 5.0, np.random.default_rng(606))
    t = np.geomspace(1e-3, 1e-1, 7)
    slopes = {}
    for q in (1.5, 2.0):
        for m in (1, 2):
            slopes[(q, m)] = stability_curve(f, bank8, m, q, 5.0, t).slope
    ok = all(0.9 <= s <= 1.1 for s in slopes.values())
    detail = ", ".join(f"q={q} m={m}: {s:.3f}" for (q, m), s in slopes.items())
    acceptance(6, ok, f"stability slopes {detail} (in [0.9, 1.1])")
    assert ok


def test_c07_chart_constants(acceptance):
    worst = 0.0
    products = []
    for omega in (np.pi / 24, np.pi / 16, np.pi / 13):
        r = chart_constants_circle(omega, n_pairs=10_000, seed=7)
        closed = 1.0 / np.sqrt(1.0 - np.sin(np.pi / 3 - omega) ** 2)
        worst = max(worst, abs(r["product"] - closed))
        products.append(r["product"])
        assert r["product"] < 2
    ok = worst <= 1e-10 and max(products) < 2
    acceptance(7, ok, f"chart c1*c2 max error {worst:.2e} (<= 1e-10), products "
                      + ", ".join(f"{p:.5f}" for p in products))
    assert ok


def test_c08_calderon_zygmund(circle, acceptance):
    rng = np.random.default_rng(808)
    results = []
    for _ in range(200):
        f, alpha = cz_instance(circle, rng)
        results.append(cz_decompose(f, alpha).check(mean_tol=1e-8, recon_tol=1e-10))
    recon = max(r["reconstruction_error"] for r in results)
    const = max(max(r["good_ratio"], r["bad_ratio"], r["measure_ratio"]) for r in results)
    ok = (all(r["passed"] for r in results) and CERTIFIED_CONSTANT <= 16
          and const <= CERTIFIED_CONSTANT and recon <= 1e-10)
    acceptance(8, ok, f"CZ 200 instances, empirical constant {const:.3f} <= certified "
                      f"{CERTIFIED_CONSTANT:g} (<= 16), reconstruction {recon:.1e}")
    assert ok


def test_c09_kernel_decay(circle, expo, acceptance):
    consts = np.array([decay_constant(expo, circle, 2.0 ** (j / 2)) for j in range(-4, 5)])
    variation = float(consts.max() / consts.min() - 1.0)
    acceptance(9, variation < 0.2, f"kernel decay constant variation {variation:.3g} (< 0.2) "
                                   f"over j in [-4, 4]; range {consts.min():.3g}..{consts.max():.3g}")
    assert variation < 0.2


def test_c10_point_cloud(expo, acceptance):
    N = 512
    theta = TWO_PI * np.arange(N) / N
    pc = build_pointcloud_spectrum(np.c_[np.cos(theta), np.sin(theta)], 9, 6 * TWO_PI / N)
    ref = build_circle_spectrum(9, N)
    exact = np.array([0.0, 1.0, 1.0, 4.0, 4.0])
    lam_err = float(np.max(np.abs(pc.eigenvalues[1:5] - exact[1:]) / exact[1:]))
    assert abs(pc.eigenvalues[0]) < 1e-12
    bp = build_wavelet_bank(expo, pc, -8, 8)
    br = build_wavelet_bank(expo, ref, -8, 8)
    vals = random_bandlimited(ref, 5.0, np.random.default_rng(1010)).values
    a = moments(Signal(vals, ref), br, 1, 2.0).vector()
    b = moments(Signal(vals, pc), bp, 1, 2.0).vector()
    table_err = float(np.max(np.abs(a - b)) / np.max(a))
    significant = a > 1e-3 * a.max()
    entry_err = float(np.max(np.abs(a - b)[significant] / a[significant]))
    ok = lam_err < 0.1 and table_err < 0.05 and entry_err < 0.05
    acceptance(10, ok, f"point cloud eigenvalue rel error {lam_err:.2e} (< 0.1), moment table "
                       f"rel error {table_err:.2e}, significant entries {entry_err:.2e} (< 0.05)")
    assert ok


def test_c11_determinism(tmp_path, monkeypatch, acceptance):
    monkeypatch.chdir(tmp_path)
    codes = [cli.main(["verify", "--seed", "11", "--threads", str(n), "--out", f"out{n}",
                       "--log-level", "WARNING"]) for n in (1, 8)]
    a = (tmp_path / "out1" / "verify_report.json").read_bytes()
    b = (tmp_path / "out8" / "verify_report.json").read_bytes()
    ok = a == b and codes == [0, 0]
    acceptance(11, ok, f"verify reports at 1 and 8 threads identical: {a == b}, exit codes {codes}")
    assert ok
