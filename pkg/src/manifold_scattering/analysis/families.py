"""Seeded test-signal families.

Members are drawn sequentially from one generator, so the first ``k``
members of a family of size ``2k`` are the family of size ``k``.
"""
from __future__ import annotations

import numpy as np

from ..spectra import Spectrum
from ..transform import Signal


def random_bandlimited(spectrum: Spectrum, lam: float, rng) -> Signal:
    """Gaussian coefficients on every mode with eigenvalue below ``lam``."""
    keep = spectrum.eigenvalues < lam
    c = np.zeros(spectrum.n_modes)
    c[keep] = rng.standard_normal(int(keep.sum()))
    return Signal(spectrum.eigenfunctions @ c, spectrum, c)


def bandlimited_family(spectrum: Spectrum, lam: float, size: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    return [random_bandlimited(spectrum, lam, rng) for _ in range(size)]


def bump(spectrum: Spectrum, center: int, width: float, amplitude: float = 1.0) -> Signal:
    """Gaussian bump in ambient distance around node ``center``."""
    X = spectrum.nodes.points
    d2 = np.sum((X - X[center]) ** 2, axis=1)
    return Signal(amplitude * np.exp(-0.5 * d2 / width ** 2), spectrum)


def spiky_family(spectrum: Spectrum, size: int, seed: int,
                 width_range=(0.02, 0.5)) -> list:
    """Narrow bumps at random nodes with log-uniform widths and random sign."""
    rng = np.random.default_rng(seed)
    lo, hi = np.log(width_range[0]), np.log(width_range[1])
    out = []
    for _ in range(size):
        center = int(rng.integers(spectrum.n_nodes))
        width = float(np.exp(rng.uniform(lo, hi)))
        sign = 1.0 if rng.random() < 0.5 else -1.0
        out.append(bump(spectrum, center, width, sign))
    return out


def cz_instance(spectrum: Spectrum, rng):
    """A random signal made of a few signed spikes plus noise, and an admissible threshold."""
    N = spectrum.n_nodes
    vals = 0.1 * rng.standard_normal(N)
    for _ in range(int(rng.integers(1, 6))):
        c = int(rng.integers(N))
        w = max(1, int(rng.integers(1, N // 8)))
        vals[c:c + w] += rng.normal(0, 10.0)
    f = Signal(vals, spectrum)
    l1 = float(np.sum(spectrum.weights * np.abs(vals)))
    lo = l1 / spectrum.volume
    hi = max(float(np.max(np.abs(vals))), lo) * 1.5
    alpha = float(lo * np.exp(rng.uniform(0.01, np.log(hi / lo) + 0.01)))
    return f, alpha
