import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from manifold_scattering.filters import build_wavelet_bank, make_profile
from manifold_scattering.spectra import build_circle_spectrum
from manifold_scattering.transform import (
    Signal, SpectralFilter, SpectrumMismatchError, analyze, apply_kernel, convolve,
    decay_constant, g_function, kernel_matrix, load_signal_raw, load_signal_text, lq_norm,
    regularity_constant, save_signal_raw, save_signal_text, synthesize, vector_norm_ratio,
    wavelet_coefficients, wavelet_kernel_filter,
)


def _bandlimited(sp, rng, kmax):
    c = np.zeros(sp.n_modes)
    c[: 2 * kmax + 1] = rng.standard_normal(2 * kmax + 1)
    return synthesize(c, sp)


def test_analysis_inverts_synthesis(circle, rng):
    c = rng.standard_normal(circle.n_modes)
    np.testing.assert_allclose(analyze(synthesize(c, circle)), c, atol=1e-13)


def test_convolution_matches_fft(circle, rng):
    # oracle: multiply DFT bins by h(k^2) on the retained frequencies
    f = _bandlimited(circle, rng, 20)
    h = SpectralFilter(np.exp(-0.3 * circle.eigenvalues), circle)
    N = circle.n_nodes
    F = np.fft.fft(f.values)
    k = np.abs(np.fft.fftfreq(N, 1.0 / N))
    F *= np.where(k <= 32, np.exp(-0.3 * k ** 2), 0.0)
    np.testing.assert_allclose(convolve(f, h).values, np.fft.ifft(F).real, atol=1e-12)


def test_kernel_matrix_reproduces_convolution(circle, rng):
    f = Signal(rng.standard_normal(circle.n_nodes), circle)
    h = SpectralFilter(np.exp(-circle.eigenvalues / 50), circle)
    np.testing.assert_allclose(apply_kernel(kernel_matrix(h), f).values, convolve(f, h).values,
                               atol=1e-12)


def test_kernel_matrix_node_cap(circle):
    h = SpectralFilter(np.ones(circle.n_modes), circle)
    with pytest.raises(MemoryError):
        kernel_matrix(h, node_cap=100)


def test_signal_validation(circle):
    with pytest.raises(ValueError, match="nodes"):
        Signal(np.zeros(10), circle)
    other = build_circle_spectrum(33, 256)
    with pytest.raises(SpectrumMismatchError):
        Signal(np.zeros(256), circle) + Signal(np.zeros(256), other)
    with pytest.raises(ValueError, match="coefficients"):
        SpectralFilter(np.zeros(3), circle)


def test_signal_is_immutable(circle):
    f = Signal(np.ones(circle.n_nodes), circle)
    with pytest.raises(ValueError):
        f.values[0] = 2.0
    assert f.coefficients[0] == pytest.approx(np.sqrt(2 * np.pi))


def test_norms_of_cosine(circle):
    f = Signal.from_function(np.cos, circle)
    assert lq_norm(f, 2) == pytest.approx(np.sqrt(np.pi), rel=1e-14)
    assert lq_norm(f, 1) == pytest.approx(4.0, rel=1e-3)
    with pytest.raises(ValueError):
        lq_norm(f, 0.5)


def test_g_function_parseval(circle, bank8, rng):
    f = _bandlimited(circle, rng, 30)
    energy = sum(lq_norm(convolve(f, bank8.filter(j)), 2) ** 2 for j in bank8.scales)
    assert lq_norm(g_function(f, bank8), 2) ** 2 == pytest.approx(energy, rel=1e-12)
    W = wavelet_coefficients(f, bank8)
    np.testing.assert_allclose(W[8], convolve(f, bank8.filter(0)).values, atol=1e-13)


def test_vector_norm_ratio_validation(circle, bank8):
    f = Signal.from_function(np.cos, circle)
    assert 0 < vector_norm_ratio(f, bank8, 1.5) < 2
    with pytest.raises(ValueError):
        vector_norm_ratio(f, bank8, 2.0)
    with pytest.raises(ValueError, match="zero"):
        vector_norm_ratio(Signal(np.zeros(circle.n_nodes), circle), bank8, 1.5)


def test_wavelet_kernel_filter_is_wavelet(circle, bank8, expo):
    for j in (-2, 0, 3):
        h = wavelet_kernel_filter(expo, circle, 2.0 ** (j / 2))
        np.testing.assert_allclose(h.coefficients, bank8.filter(j).coefficients, atol=1e-15)


def test_kernel_constants_finite(expo):
    sp = build_circle_spectrum(33, 128)
    assert 0 < decay_constant(expo, sp, 0.5) < np.inf
    assert 0 < regularity_constant(expo, sp, 0.5, delta=0.2) < np.inf


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), j=st.integers(-8, 8))
def test_wavelet_convolution_contracts(seed, j):
    sp = build_circle_spectrum(33, 128)
    bank = build_wavelet_bank(make_profile("exponential"), sp, -8, 8)
    f = Signal(np.random.default_rng(seed).standard_normal(128), sp)
    assert lq_norm(convolve(f, bank.filter(j)), 2) <= lq_norm(f, 2) * (1 + 1e-12)


@pytest.mark.parametrize("fmt", ["text", "raw"])
def test_signal_file_roundtrip(tmp_path, circle, rng, fmt):
    f = Signal(rng.standard_normal(circle.n_nodes), circle)
    path = tmp_path / f"s.{fmt}"
    if fmt == "text":
        save_signal_text(f, path)
        g = load_signal_text(path, circle)
    else:
        save_signal_raw(f, path)
        g = load_signal_raw(path, circle)
    np.testing.assert_array_equal(f.values, g.values)


def test_signal_file_errors(tmp_path, circle):
    p = tmp_path / "bad.txt"
    p.write_text("0 1.0\n")
    with pytest.raises(ValueError, match="missing"):
        load_signal_text(p, circle)
    p.write_text("999 1.0\n")
    with pytest.raises(ValueError, match="out of range"):
        load_signal_text(p, circle)
    r = tmp_path / "bad.bin"
    r.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(ValueError, match="magic"):
        load_signal_raw(r)
    save_signal_raw(Signal(np.ones(circle.n_nodes), circle), r)
    r.write_bytes(r.read_bytes()[:-8])
    with pytest.raises(ValueError, match="truncated"):
        load_signal_raw(r)
