"""Bilipschitz chart constants for the unit circle.

Four charts cover the circle. Each chart interval P_i is an arc of length
2 pi/3 - 2 omega centred on a coordinate axis, and its coordinate map
projects onto the axis perpendicular to the centre direction, so the
chart is a graph over an interval of (-1, 1).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..spectra import TWO_PI, arc_distance

OMEGA_MAX = np.pi / 12
_COMPLEX_STEP = 1e-30


@dataclass(frozen=True)
class Chart:
    """Arc (center - half_width, center + half_width) with coordinate u = <x, axis>."""

    center: float
    half_width: float

    @property
    def axis(self) -> np.ndarray:
        # unit tangent at the centre: coordinate along it is monotone on the arc
        return np.array([-np.sin(self.center), np.cos(self.center)])

    def contains(self, theta, margin: float = 0.0):
        return arc_distance(theta, self.center) < self.half_width - margin

    def phi(self, theta):
        theta = np.asarray(theta)
        return -np.sin(self.center) * np.cos(theta) + np.cos(self.center) * np.sin(theta)

    def phi_inverse(self, u):
        """Embedded point (x1, x2) with chart coordinate u; works for complex u."""
        s = np.sqrt(1.0 - u * u)
        c, n = np.cos(self.center), np.sin(self.center)
        # s along the centre direction, u along the axis
        return np.stack([s * c - u * n, s * n + u * c])

    def coordinate_range(self) -> tuple[float, float]:
        m = float(np.sin(self.half_width))
        return -m, m

    def metric_sqrt(self, u) -> np.ndarray:
        """sqrt of the pulled-back metric |d phi^-1 / du|, by complex-step differentiation."""
        u = np.asarray(u, dtype=float)
        d = np.imag(self.phi_inverse(u + 1j * _COMPLEX_STEP)) / _COMPLEX_STEP
        return np.sqrt(np.sum(d * d, axis=0))


@dataclass(frozen=True)
class ChartAtlas:
    charts: tuple
    lebesgue_delta: float
    c1: float
    c2: float
    omega: float
    checks: dict = field(default_factory=dict)


def default_delta(omega: float) -> float:
    """Half the largest delta for which 3 delta-balls fit in a chart.

    Consecutive charts overlap on an arc of length pi/6 - 2 omega, so every
    ball of diameter 6 delta fits in one chart once 6 delta < pi/6 - 2 omega.
    """
    return 0.5 * (np.pi / 6 - 2 * omega) / 6


def build_atlas(omega: float) -> tuple:
    half = np.pi / 3 - omega
    return tuple(Chart(c, half) for c in (0.0, np.pi / 2, np.pi, 1.5 * np.pi))


def _metric_extremes(charts, n_grid: int = 20_001):
    lo, hi = np.inf, 0.0
    for ch in charts:
        a, b = ch.coordinate_range()
        u = np.linspace(a, b, n_grid)
        g = ch.metric_sqrt(u)
        lo, hi = min(lo, float(g.min())), max(hi, float(g.max()))
    return lo, hi


def _check_lebesgue(charts, delta, rng, n) -> bool:
    x = rng.uniform(0, TWO_PI, n)
    inside = np.zeros(n, dtype=bool)
    for ch in charts:
        inside |= ch.contains(x, margin=3 * delta)
    return bool(inside.all())


def _bilipschitz_checks(charts, delta, c1, c2, n_pairs, rng, rtol=1e-12) -> dict:
    worst_upper = 0.0        # max r / (c2 |phi y - phi z|)
    worst_lower = 0.0        # max c1 |phi y - phi z| / r
    per = n_pairs // len(charts)
    for ch in charts:
        # r <= c2 |phi(y) - phi(z)| for y, z anywhere in the chart
        y = ch.center + rng.uniform(-ch.half_width, ch.half_width, per)
        z = ch.center + rng.uniform(-ch.half_width, ch.half_width, per)
        r = arc_distance(y, z)
        du = np.abs(ch.phi(y) - ch.phi(z))
        ok = r > 0
        worst_upper = max(worst_upper, float(np.max(r[ok] / (c2 * du[ok]))))
        # c1 |phi(y) - phi(z)| <= r for y, z in a delta-ball whose 3 delta-ball fits in the chart
        x = ch.center + rng.uniform(-(ch.half_width - 3 * delta), ch.half_width - 3 * delta, per)
        y = x + rng.uniform(-delta, delta, per)
        z = x + rng.uniform(-delta, delta, per)
        r = arc_distance(y, z)
        du = np.abs(ch.phi(y) - ch.phi(z))
        ok = r > 0
        worst_lower = max(worst_lower, float(np.max(c1 * du[ok] / r[ok])))
    return {"upper_ratio": worst_upper, "lower_ratio": worst_lower,
            "upper_ok": worst_upper <= 1 + rtol, "lower_ok": worst_lower <= 1 + rtol}


def chart_constants_circle(omega: float, delta: float | None = None,
                           n_pairs: int = 10_000, seed: int = 0) -> dict:
    """c1, c2 and c1 c2 for the four-chart atlas of the unit circle.

    c1 and c2 are the extremes of the pulled-back metric over the closures
    of the chart images; c2 = 1 / cos(pi/3 - omega) and c1 = 1.

    Raises
    ------
    ValueError
        If omega or delta is out of range, or a sampled pair violates
        either bilipschitz inequality.
    """
    if not 0 < omega < OMEGA_MAX:
        raise ValueError(f"omega must lie in (0, pi/12), got {omega!r}")
    if delta is None:
        delta = default_delta(omega)
    if not 0 < delta < np.pi / 36:
        raise ValueError(f"delta must lie in (0, pi/36), got {delta!r}")
    charts = build_atlas(omega)
    rng = np.random.default_rng(seed)
    if not _check_lebesgue(charts, delta, rng, n_pairs):
        raise ValueError(f"3 delta = {3 * delta!r} is not a Lebesgue number for the cover")
    c1, c2 = _metric_extremes(charts)
    checks = _bilipschitz_checks(charts, delta, c1, c2, n_pairs, rng)
    if not (checks["upper_ok"] and checks["lower_ok"]):
        raise ValueError(f"bilipschitz check failed: {checks}")
    product = c1 * c2
    if not product < 2:
        raise ValueError(f"c1 c2 = {product} is not below 2")
    atlas = ChartAtlas(charts, float(delta), c1, c2, float(omega), checks)
    return {"c1": c1, "c2": c2, "product": product, "atlas": atlas}
