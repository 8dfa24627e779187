"""Verification suites driven by a run configuration.

Each suite returns a report from :func:`analysis.experiment_report`; its
``flags`` name the invariants checked, so a failing run can say which
one failed. Suites draw randomness from ``default_rng([seed, index])``
with a fixed per-suite index, so a suite's results do not depend on which
other suites run.
"""
from __future__ import annotations

import numpy as np

from . import analysis as an
from .config import SUITES
from .filters import build_wavelet_bank, frame_defect, telescoped_sum
from .spectra import TWO_PI, Spectrum
from .transform import decay_constant


class SuiteUnavailable(ValueError):
    """The suite does not apply to the configured manifold."""


def _rng(seed, suite: str):
    return np.random.default_rng([int(seed), SUITES.index(suite)])


def _seed(seed, suite):
    return int(np.random.SeedSequence([int(seed), SUITES.index(suite)]).generate_state(1)[0])


def _lam(value):
    return np.inf if value is None else float(value)


def _require(sp: Spectrum, kinds, suite):
    if sp.kind not in kinds:
        raise SuiteUnavailable(f"suite {suite!r} needs a {' or '.join(kinds)} spectrum, "
                               f"got {sp.kind}")


def suite_frame(sp, profile, bank, p, seed, workers):
    fb = build_wavelet_bank(profile, sp, p["j_min"], p["j_max"])
    fam = an.bandlimited_family(sp, _lam(p["lam"]), p["n_signals"], _seed(seed, "frame"))
    errs = [an.frame_identity_error(f, fb) for f in fam]
    nz = sp.eigenvalues > 0
    tele = np.max(np.abs(np.sum(fb.coefficients[:, nz] ** 2, axis=0)
                         - telescoped_sum(profile, sp.eigenvalues[nz], p["j_min"], p["j_max"])),
                  initial=0.0)
    defect = frame_defect(fb)[nz]
    return an.experiment_report(
        "frame", p, seed, rows=[{"signal": i, "relative_error": e} for i, e in enumerate(errs)],
        fitted={"max_relative_error": max(errs), "telescoping_error": float(tele),
                "max_mode_defect": float(np.max(np.abs(defect), initial=0.0))},
        flags={"frame_identity": max(errs) < p["tolerance"], "telescoping": tele <= 1e-12})


def suite_nonexpansive(sp, profile, bank, p, seed, workers):
    n = p["n_pairs"]
    fam = an.bandlimited_family(sp, _lam(p["lam"]), 2 * n, _seed(seed, "nonexpansive"))
    rows, worst = [], {}
    for m in p["orders"]:
        r = [an.nonexpansive_ratio(fam[2 * i], fam[2 * i + 1], bank, m, workers) for i in range(n)]
        worst[f"m{m}"] = max(r)
        rows.append({"m": m, "max_ratio": max(r)})
    return an.experiment_report(
        "nonexpansive", p, seed, rows=rows, fitted=worst,
        flags={f"nonexpansive_m{m}": worst[f"m{m}"] <= 1 + p["tolerance"] for m in p["orders"]})


def suite_boundedness(sp, profile, bank, p, seed, workers):
    n = p["family_size"]
    fam = an.bandlimited_family(sp, _lam(p["lam"]), 2 * n, _seed(seed, "boundedness"))
    rows, flags = [], {}
    for q in p["q"]:
        for m in p["orders"]:
            c = an.empirical_constant(fam, lambda f: an.boundedness_ratio(f, bank, m, q, workers))
            rows.append({"q": q, "m": m, **c})
            flags[f"bounded_q{q}_m{m}"] = c["finite"] and c["relative_change"] < p["tolerance"]
    return an.experiment_report("boundedness", p, seed, rows=rows, flags=flags)


def _isometries(sp, p):
    if sp.kind == "circle":
        n = sp.params["n_nodes"]
        maps = [an.rotation(TWO_PI * s[0] / n) for s in p["shifts"]]
        if p["reflection"]:
            maps.append(an.reflection())
        return maps
    n = sp.params["n_nodes_per_axis"]
    maps = [an.torus_translation(TWO_PI * s[0] / n, TWO_PI * s[1] / n) for s in p["shifts"]]
    if p["reflection"]:
        maps.append(an.torus_swap())
    return maps


def suite_isometry(sp, profile, bank, p, seed, workers):
    _require(sp, ("circle", "torus"), "isometry")
    f = an.random_bandlimited(sp, _lam(p["lam"]), _rng(seed, "isometry"))
    rows = []
    for xi in _isometries(sp, p):
        xi.check(sp)
        for m in p["orders"]:
            for q in p["q"]:
                rows.append(an.isometry_invariance_report(f, bank, m, q, xi, p["tolerance"], workers))
    worst = max(r["max_rel"] for r in rows)
    return an.experiment_report("isometry", p, seed, rows=rows, fitted={"max_rel": worst},
                                flags={"isometry_invariance": all(r["passed"] for r in rows)})


def suite_stability(sp, profile, bank, p, seed, workers):
    _require(sp, ("circle",), "stability")
    lam = _lam(p["lam"])
    f = an.random_bandlimited(sp, lam, _rng(seed, "stability"))
    t = np.geomspace(p["t_min"], p["t_max"], p["n_t"])
    lo, hi = p["slope_range"]

    def family(s):
        return an.sine_diffeomorphism(s, p["harmonic"])

    rows, flags = [], {}
    for q in p["q"]:
        for m in p["orders"]:
            c = an.stability_curve(f, bank, m, q, lam, t, family, workers)
            rows.append(c.to_dict())
            flags[f"slope_q{q}_m{m}"] = lo <= c.slope <= hi
    return an.experiment_report("stability", p, seed, rows=rows, flags=flags)


def suite_chart(sp, profile, bank, p, seed, workers):
    rows, flags = [], {}
    for k, om in enumerate(p["omega"]):
        closed = 1.0 / np.sqrt(1.0 - np.sin(np.pi / 3 - om) ** 2)
        try:
            r = an.chart_constants_circle(om, n_pairs=p["n_pairs"], seed=_seed(seed, "chart") + k)
        except ValueError as exc:
            rows.append({"omega": om, "error": str(exc)})
            flags[f"chart_{k}"] = False
            continue
        err = abs(r["product"] - closed)
        rows.append({"omega": om, "c1": r["c1"], "c2": r["c2"], "product": r["product"],
                     "closed_form": closed, "error": err, **r["atlas"].checks})
        flags[f"chart_{k}"] = err <= p["tolerance"] and r["product"] < 2
    return an.experiment_report("chart", p, seed, rows=rows, flags=flags)


def suite_cz(sp, profile, bank, p, seed, workers):
    _require(sp, ("circle",), "cz")
    rng = _rng(seed, "cz")
    worst = {"good_ratio": 0.0, "bad_ratio": 0.0, "measure_ratio": 0.0,
             "reconstruction_error": 0.0, "mean_error": 0.0}
    all_ok = True
    for _ in range(p["n_instances"]):
        f, alpha = an.cz_instance(sp, rng)
        r = an.cz_decompose(f, alpha).check(p["mean_tol"], p["recon_tol"])
        all_ok &= r["passed"]
        for k in worst:
            worst[k] = max(worst[k], r[k])
    const = max(worst["good_ratio"], worst["bad_ratio"], worst["measure_ratio"])
    return an.experiment_report(
        "cz", p, seed, fitted={**worst, "empirical_constant": const,
                               "certified_constant": an.CERTIFIED_CONSTANT},
        flags={"cz_inequalities": all_ok,
               "certified_constant": an.CERTIFIED_CONSTANT <= p["certified_max"],
               "reconstruction": worst["reconstruction_error"] <= p["recon_tol"]})


def suite_weak11(sp, profile, bank, p, seed, workers):
    fam = an.spiky_family(sp, 2 * p["family_size"], _seed(seed, "weak11"))
    reports = [an.weak_11_ratio(f, bank) for f in fam]
    c = an.empirical_constant(reports, lambda r: r["exact_ratio"])
    below = all(r["grid_ratio"] <= r["exact_ratio"] * (1 + 1e-12)
                and r["exact_ratio"] <= r["strong_ratio"] * (1 + 1e-12) for r in reports)
    return an.experiment_report(
        "weak11", p, seed, fitted=c,
        flags={"weak_constant_stable": c["relative_change"] < p["tolerance"],
               "weak_below_strong": below})


def suite_kernel_decay(sp, profile, bank, p, seed, workers):
    rows = []
    for j in range(p["j_min"], p["j_max"] + 1):
        t = 2.0 ** (j / 2)
        rows.append({"j": j, "t": t, "constant": decay_constant(profile, sp, t)})
    c = np.array([r["constant"] for r in rows])
    variation = float(c.max() / c.min() - 1.0)
    return an.experiment_report("kernel_decay", p, seed, rows=rows,
                                fitted={"variation": variation},
                                flags={"decay_constant_stable": variation < p["tolerance"]})


SUITE_FUNCTIONS = {
    "frame": suite_frame, "nonexpansive": suite_nonexpansive,
    "boundedness": suite_boundedness, "isometry": suite_isometry,
    "stability": suite_stability, "chart": suite_chart, "cz": suite_cz,
    "weak11": suite_weak11, "kernel_decay": suite_kernel_decay,
}


def run_suites(spectrum, profile, bank, cfg: dict, workers: int = 1) -> dict:
    """Run the configured suites; returns {suite name: report}."""
    v = cfg["verify"]
    out = {}
    for name in v["suites"]:
        out[name] = SUITE_FUNCTIONS[name](spectrum, profile, bank, v[name], cfg["seed"], workers)
    return out
