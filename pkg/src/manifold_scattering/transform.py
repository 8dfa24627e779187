"""Spectral analysis, synthesis and convolution of signals on a manifold.

Every integral is a quadrature sum over the spectrum's nodes, and the
eigenfunctions are real, so no conjugation appears anywhere.
"""
from __future__ import annotations

import struct
from pathlib import Path
from typing import Optional

import numpy as np

from .spectra import Spectrum

DEFAULT_NODE_CAP = 4096

SIGNAL_MAGIC = b"GSIG"
SIGNAL_VERSION = 1
_SIGNAL_HEADER = struct.Struct("<4sIQ")


class SpectrumMismatchError(ValueError):
    pass


class Signal:
    """Function values at the quadrature nodes of a spectrum.

    Spectral coefficients are computed on first access and cached; the
    cache is published in one assignment, so concurrent first accesses
    at worst duplicate the work.
    """

    __slots__ = ("values", "spectrum", "_coefficients")

    def __init__(self, values, spectrum: Spectrum, coefficients=None):
        values = np.array(values, dtype=float, copy=True)
        if values.shape != (spectrum.n_nodes,):
            raise ValueError(
                f"signal has {values.shape} values, spectrum has {spectrum.n_nodes} nodes")
        values.flags.writeable = False
        self.values = values
        self.spectrum = spectrum
        if coefficients is not None:
            coefficients = np.array(coefficients, dtype=float, copy=True)
            coefficients.flags.writeable = False
        self._coefficients = coefficients

    @property
    def coefficients(self) -> np.ndarray:
        c = self._coefficients
        if c is None:
            c = _analyze_values(self.values, self.spectrum)
            c.flags.writeable = False
            self._coefficients = c
        return c

    @classmethod
    def from_function(cls, func, spectrum: Spectrum) -> "Signal":
        """Sample ``func`` at the intrinsic coordinates of the nodes."""
        coords = spectrum.nodes.coords
        if coords is None:
            raise ValueError("spectrum nodes have no intrinsic coordinates")
        return cls(func(coords), spectrum)

    def __add__(self, other):
        _check_same(self.spectrum, other.spectrum)
        return Signal(self.values + other.values, self.spectrum)

    def __sub__(self, other):
        _check_same(self.spectrum, other.spectrum)
        return Signal(self.values - other.values, self.spectrum)

    def __mul__(self, scalar):
        return Signal(scalar * self.values, self.spectrum)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Signal(n_nodes={self.values.shape[0]}, spectrum={self.spectrum.kind})"


class SpectralFilter:
    """Frequency multipliers h(n), one per retained mode."""

    __slots__ = ("coefficients", "spectrum")

    def __init__(self, coefficients, spectrum: Spectrum):
        c = np.array(coefficients, dtype=float, copy=True)
        if c.shape != (spectrum.n_modes,):
            raise ValueError(f"filter has {c.shape} coefficients, expected ({spectrum.n_modes},)")
        c.flags.writeable = False
        self.coefficients = c
        self.spectrum = spectrum

    def is_spectral(self) -> bool:
        """True when equal eigenvalues carry equal coefficients."""
        lam = self.spectrum.eigenvalues
        same = lam[:, None] == lam[None, :]
        return bool(np.all((self.coefficients[:, None] == self.coefficients[None, :]) | ~same))


def _check_same(a: Spectrum, b: Spectrum):
    if not a.same_as(b):
        raise SpectrumMismatchError("operands live on different spectra")


def _analyze_values(values, spectrum: Spectrum) -> np.ndarray:
    return spectrum.eigenfunctions.T @ (spectrum.weights * values)


def analyze(f: Signal) -> np.ndarray:
    """Spectral coefficients sum_i w_i f(x_i) e_n(x_i)."""
    return f.coefficients


def synthesize(coefficients, spectrum: Spectrum) -> Signal:
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape != (spectrum.n_modes,):
        raise ValueError(
            f"expected {spectrum.n_modes} coefficients, got {coefficients.shape}")
    return Signal(spectrum.eigenfunctions @ coefficients, spectrum, coefficients)


def convolve(f: Signal, h: SpectralFilter) -> Signal:
    """Spectral convolution: multiply coefficients by h, then synthesize.

    Only the retained modes survive, so convolution also projects ``f``
    onto the truncated eigenbasis.
    """
    _check_same(f.spectrum, h.spectrum)
    return synthesize(f.coefficients * h.coefficients, f.spectrum)


def kernel_matrix(h: SpectralFilter, node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    """K[i, j] = sum_n h(n) e_n(x_i) e_n(x_j).

    Applying ``K`` with the quadrature weights reproduces :func:`convolve`.
    Refuses more than ``node_cap`` nodes to avoid accidental O(N^2) blowups.
    """
    sp = h.spectrum
    if sp.n_nodes > node_cap:
        raise MemoryError(f"{sp.n_nodes} nodes exceeds kernel node cap {node_cap}")
    E = sp.eigenfunctions
    return (E * h.coefficients) @ E.T


def apply_kernel(K: np.ndarray, f: Signal) -> Signal:
    return Signal(K @ (f.spectrum.weights * f.values), f.spectrum)


def wavelet_kernel_filter(profile, spectrum: Spectrum, t: float) -> SpectralFilter:
    """Filter F(t^2 lam) with F(x) = sqrt(G(x/2)^2 - G(x)^2).

    With t = 2^(j/2) this is exactly the wavelet psi_j; the decay and
    regularity estimates are stated in terms of t.
    """
    from .filters import wavelet_response
    return SpectralFilter(wavelet_response(profile, t * t * spectrum.eigenvalues), spectrum)


def decay_constant(profile, spectrum: Spectrum, t: float,
                   node_cap: int = DEFAULT_NODE_CAP) -> float:
    """sup over node pairs of |K_t(x, y)| t^n (1 + r(x, y)/t)^(n + 1)."""
    K = kernel_matrix(wavelet_kernel_filter(profile, spectrum, t), node_cap)
    r = spectrum.nodes.distance_matrix()
    n = spectrum.dimension
    return float(np.max(np.abs(K) * t ** n * (1.0 + r / t) ** (n + 1)))


def regularity_constant(profile, spectrum: Spectrum, t: float, delta: float,
                        node_cap: int = DEFAULT_NODE_CAP) -> float:
    """Smallest C with |K_t(x,y) - K_t(x,z)| <= C r(y,z) t^(-n-1) (1 + r(x,y)/t)^(-n-1).

    The sup runs over all node triples with r(y, z) < min(r(x, y)/2, delta),
    where z is restricted to the nearest neighbours of y (any admissible z
    closer than delta would do; neighbours make the scan O(N^2)).
    """
    K = kernel_matrix(wavelet_kernel_filter(profile, spectrum, t), node_cap)
    D = spectrum.nodes.distance_matrix()
    n = spectrum.dimension
    N = spectrum.n_nodes
    nbr = np.argsort(D, axis=1)[:, 1:1 + 2 * n]
    best = 0.0
    for col in range(nbr.shape[1]):
        z = nbr[:, col]              # neighbour of each y
        ryz = D[np.arange(N), z]     # r(y, z), per y
        ok = (ryz[None, :] < 0.5 * D) & (ryz[None, :] < delta)   # [x, y]
        diff = np.abs(K - K[:, z])
        bound = ryz[None, :] * t ** (-n - 1) * (1.0 + D / t) ** (-(n + 1))
        ratio = np.where(ok, diff / bound, 0.0)
        best = max(best, float(ratio.max()))
    return best


def g_function(f: Signal, bank) -> Signal:
    """Pointwise l^2 norm over scales of the wavelet coefficients f * psi_j."""
    return Signal(np.sqrt(np.sum(wavelet_coefficients(f, bank) ** 2, axis=0)), f.spectrum)


def wavelet_coefficients(f: Signal, bank) -> np.ndarray:
    """Array of shape (n_scales, n_nodes) holding f * psi_j at every node."""
    _check_same(f.spectrum, bank.spectrum)
    E = f.spectrum.eigenfunctions
    return (bank.coefficients * f.coefficients) @ E.T


def lq_norm(f, q: float) -> float:
    """(sum_i w_i |f(x_i)|^q)^(1/q) for q >= 1."""
    if not q >= 1:
        raise ValueError(f"q must be >= 1, got {q!r}")
    return float(np.sum(f.spectrum.weights * np.abs(f.values) ** q) ** (1.0 / q))


def vector_norm_ratio(f: Signal, bank, q: float) -> float:
    """||g_function(f)||_q / ||f||_q, the quantity bounded by C_q."""
    if not 1 < q < 2:
        raise ValueError(f"q must lie in (1, 2), got {q!r}")
    nf = lq_norm(f, q)
    if nf == 0:
        raise ValueError("zero signal")
    return lq_norm(g_function(f, bank), q) / nf


# ---------------------------------------------------------------------------
# signal files


def save_signal_text(f: Signal, path) -> None:
    lines = [f"{i} {float(v)!r}" for i, v in enumerate(f.values)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_signal_text(path, spectrum: Spectrum) -> Signal:
    """Read ``index value`` rows (``#`` comments allowed) onto ``spectrum``."""
    vals = np.full(spectrum.n_nodes, np.nan)
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'index value'")
        i = int(parts[0])
        if not 0 <= i < spectrum.n_nodes:
            raise ValueError(f"{path}:{lineno}: node index {i} out of range")
        vals[i] = float(parts[1])
    if np.isnan(vals).any():
        raise ValueError(f"{path}: missing values for {int(np.isnan(vals).sum())} nodes")
    return Signal(vals, spectrum)


def save_signal_raw(f: Signal, path) -> None:
    """Header (magic ``GSIG``, u32 version, u64 count) then little-endian float64."""
    payload = _SIGNAL_HEADER.pack(SIGNAL_MAGIC, SIGNAL_VERSION, f.values.shape[0])
    Path(path).write_bytes(payload + np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def load_signal_raw(path, spectrum: Optional[Spectrum] = None):
    """Read a raw signal; returns a :class:`Signal` if ``spectrum`` is given, else the array."""
    data = Path(path).read_bytes()
    if len(data) < _SIGNAL_HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, n = _SIGNAL_HEADER.unpack_from(data)
    if magic != SIGNAL_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != SIGNAL_VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    if len(data) != _SIGNAL_HEADER.size + 8 * n:
        raise ValueError(f"{path}: truncated payload")
    vals = np.frombuffer(data, dtype="<f8", offset=_SIGNAL_HEADER.size).copy()
    return vals if spectrum is None else Signal(vals, spectrum)
