"""Experiment runners: frame identity, nonexpansiveness, boundedness,
isometry invariance, diffeomorphism stability and weak-type bounds."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..filters import WaveletBank
from ..scattering import moments, scattering_norm, scattering_norm_power
from ..transform import Signal, g_function, lq_norm, vector_norm_ratio, wavelet_coefficients
from .actions import ISOMETRY, PointMap, apply_action, is_bandlimited, sine_diffeomorphism

INVARIANCE_TOL = 1e-8
# cascade round-off is ~1e-15 of the table maximum in absolute terms, so
# entries below this fraction of the maximum cannot be resolved to 1e-8
# relative; their error is measured against the floor instead
RELATIVE_FLOOR = 1e-10


def _map(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def frame_identity_error(f: Signal, bank: WaveletBank) -> float:
    """|sum_j ||f * psi_j||^2 - C^2 ||f||^2| / (C^2 ||f||^2) for mean-zero f.

    The constant mode is carried by the low-pass filter only, so it is
    removed from ``f`` first.
    """
    c = np.array(f.coefficients)
    c[f.spectrum.eigenvalues == 0] = 0.0
    total = np.sum(c ** 2)
    if total == 0:
        raise ValueError("signal has no nonconstant content")
    C2 = bank.profile.C ** 2
    w = wavelet_coefficients(Signal(f.spectrum.eigenfunctions @ c, f.spectrum, c), bank)
    energy = float(np.sum(f.spectrum.weights * w * w))
    return abs(energy - C2 * total) / (C2 * total)


def nonexpansive_ratio(f: Signal, g: Signal, bank: WaveletBank, m: int,
                       workers: int = 1) -> float:
    """||S2 f - S2 g||^2 / (C^(2m) ||f - g||_2^2); at most 1 in theory."""
    d = lq_norm(f - g, 2.0) ** 2
    if d == 0:
        return 0.0
    a = moments(f, bank, m, 2.0, workers=workers)
    b = moments(g, bank, m, 2.0, workers=workers)
    return scattering_norm(a, b) ** 2 / (bank.profile.C ** (2 * m) * d)


def boundedness_ratio(f: Signal, bank: WaveletBank, m: int, q: float,
                      workers: int = 1) -> float:
    """||S_q^m f||^q / ||f||_q^q."""
    nf = lq_norm(f, q)
    if nf == 0:
        raise ValueError("zero signal")
    return scattering_norm_power(moments(f, bank, m, q, workers=workers)) / nf ** q


def empirical_constant(signals, ratio) -> dict:
    """Max of ``ratio`` over a family, plus the max over its first half."""
    r = np.array([ratio(f) for f in signals])
    half = r[: max(1, len(r) // 2)]
    full, first = float(r.max()), float(half.max())
    return {"max": full, "max_first_half": first,
            "relative_change": abs(full - first) / first if first else 0.0,
            "finite": bool(np.all(np.isfinite(r))), "n": int(len(r))}


def vector_norm_constant(signals, bank: WaveletBank, q: float) -> dict:
    """Empirical C_q = max ||g_function(f)||_q / ||f||_q over a family."""
    return empirical_constant(signals, lambda f: vector_norm_ratio(f, bank, q))


def _relative_deviation(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    diff = np.abs(a - b)
    scale = max(float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), RELATIVE_FLOOR * scale)
    rel = np.divide(diff, denom, out=np.zeros_like(diff), where=denom > 0)
    return float(np.max(diff, initial=0.0)), float(np.max(rel, initial=0.0))


def isometry_invariance_report(f: Signal, bank: WaveletBank, m: int, q: float,
                               xi: PointMap, tol: float = INVARIANCE_TOL,
                               workers: int = 1) -> dict:
    """Compare the moment tables of f and V_xi f entry by entry.

    Relative error uses max(|a|, |b|, 1e-10 * table max) as denominator so
    that entries at round-off level do not dominate.
    """
    if xi.kind != ISOMETRY:
        raise ValueError(f"{xi.name} is a {xi.kind}, not an isometry")
    a = moments(f, bank, m, q, workers=workers)
    b = moments(apply_action(f, xi), bank, m, q, workers=workers)
    max_abs, max_rel = _relative_deviation(a.vector(), b.vector())
    return {"map": xi.name, "m": m, "q": q, "max_abs": max_abs,
            "max_rel": max_rel, "tol": tol, "passed": max_rel <= tol}


@dataclass
class StabilityCurve:
    t: np.ndarray
    displacement: np.ndarray
    deviation: np.ndarray
    slope: float
    constant: float
    lam: float
    m: int
    q: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("t", "displacement", "deviation"):
            d[k] = [float(v) for v in d[k]]
        return d


def loglog_slope(x, y) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def stability_curve(f: Signal, bank: WaveletBank, m: int, q: float, lam: float,
                    t_grid, family=sine_diffeomorphism, workers: int = 1) -> StabilityCurve:
    """Deviation ||S_q^m f - S_q^m V_xi_t f||_l2 against ||xi_t||_inf.

    The fitted constant is the smallest C with
    deviation <= C lam^n ||xi_t||_inf ||f||_q over the grid.
    """
    if not is_bandlimited(f, lam):
        raise ValueError(f"signal is not {lam}-bandlimited")
    base = moments(f, bank, m, q)
    t_grid = np.asarray(t_grid, dtype=float)

    def trial(t):
        xi = family(t)
        dev = scattering_norm(base, moments(apply_action(f, xi), bank, m, q))
        return xi.sup_displacement, dev

    rows = _map(trial, t_grid, workers)
    disp = np.array([r[0] for r in rows])
    dev = np.array([r[1] for r in rows])
    scale = lam ** f.spectrum.dimension * lq_norm(f, q)
    nz = disp > 0
    const = float(np.max(dev[nz] / (disp[nz] * scale))) if nz.any() else 0.0
    return StabilityCurve(t_grid, disp, dev, loglog_slope(disp, dev), const, float(lam), m, float(q))


def weak_11_ratio(f: Signal, bank: WaveletBank, deltas=None) -> dict:
    """sup_delta delta * mu{g_function(f) > delta} / ||f||_1.

    ``grid_ratio`` uses the delta grid (default 400 points log-spaced over
    [1e-6, 1e3] * ||f||_1 / vol); ``exact_ratio`` takes the supremum over
    all level values, approached from below each attained value.
    ``strong_ratio`` is ||g_function(f)||_1 / ||f||_1, an upper bound for both.
    """
    sp = f.spectrum
    l1 = lq_norm(f, 1.0)
    if l1 == 0:
        raise ValueError("zero signal")
    g = g_function(f, bank).values
    w = sp.weights
    if deltas is None:
        deltas = np.geomspace(1e-6, 1e3, 400) * l1 / sp.volume
    deltas = np.asarray(deltas, dtype=float)
    order = np.argsort(g)[::-1]
    gs, cum = g[order], np.cumsum(w[order])
    # mu{g > d}: mass of entries strictly above d
    k = np.searchsorted(-gs, -deltas, side="left")
    mass = np.where(k > 0, cum[np.maximum(k - 1, 0)], 0.0)
    grid = float(np.max(deltas * mass)) / l1
    exact = float(np.max(gs * cum)) / l1 if gs.size else 0.0
    strong = float(np.sum(w * g)) / l1
    return {"grid_ratio": grid, "exact_ratio": exact, "strong_ratio": strong,
            "n_deltas": int(deltas.size)}


def weak_11_constant(signals, bank: WaveletBank) -> dict:
    """Empirical weak-type constant A over a family (exact-sup ratios)."""
    return empirical_constant(signals, lambda f: weak_11_ratio(f, bank)["exact_ratio"])
