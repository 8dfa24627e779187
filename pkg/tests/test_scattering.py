import itertools

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from manifold_scattering.filters import build_wavelet_bank, make_profile
from manifold_scattering.scattering import (
    MomentTable, moments, moments_naive, propagate, scattering_norm, scattering_norm_power,
    windowed_limit, windowed_scattering,
)
from manifold_scattering.spectra import build_circle_spectrum
from manifold_scattering.transform import Signal, convolve, lq_norm, synthesize

mpmath.mp.dps = 40


def _psi0_at_one():
    # psi_0 at lambda = 1 for G(x) = exp(-x): sqrt(exp(-1) - exp(-2))
    return mpmath.sqrt(mpmath.e ** -1 - mpmath.e ** -2)


def test_cosine_first_order_l2(circle, bank8):
    table = moments(Signal.from_function(np.cos, circle), bank8, 1, 2.0)
    oracle = float(_psi0_at_one() * mpmath.sqrt(mpmath.pi))
    assert table[(0,)] == pytest.approx(oracle, rel=1e-13)
    assert table[(0,)] == pytest.approx(0.85480, abs=1e-4)
    assert len(table.entries) == 17


def test_cosine_first_order_l1(circle, bank8):
    table = moments(Signal.from_function(np.cos, circle), bank8, 1, 1.0)
    # ||cos||_1 = 4; the trapezoid rule on |cos| is accurate to ~1e-5 at 256 nodes
    assert table[(0,)] == pytest.approx(float(4 * _psi0_at_one()), rel=1e-4)


def test_constant_signal_has_zero_moments(circle, bank8):
    e0 = synthesize(np.eye(circle.n_modes)[0], circle)
    for m in (1, 2):
        assert np.all(moments(e0, bank8, m, 2.0).vector() == 0)


@pytest.mark.parametrize("q", [0.5, 2.5, float("nan")])
def test_rejects_q_out_of_range(circle, bank8, q):
    with pytest.raises(ValueError, match="q must"):
        moments(Signal.from_function(np.cos, circle), bank8, 1, q)


@pytest.mark.parametrize("m", [0, -1, 1.5])
def test_rejects_bad_order(circle, bank8, m):
    with pytest.raises(ValueError, match="order"):
        moments(Signal.from_function(np.cos, circle), bank8, m, 2.0)


def test_path_cap(circle, bank8):
    with pytest.raises(ValueError, match="cap"):
        moments(Signal.from_function(np.cos, circle), bank8, 3, 2.0, path_cap=1000)


@pytest.mark.parametrize("m, q", [(1, 1.5), (2, 2.0), (3, 1.25)])
def test_cascade_matches_per_path(m, q):
    sp = build_circle_spectrum(33, 128)
    bank = build_wavelet_bank(make_profile("exponential"), sp, -2, 2)
    f = Signal(np.random.default_rng(m).standard_normal(128), sp)
    fast, slow = moments(f, bank, m, q).vector(), moments_naive(f, bank, m, q).vector()
    np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-15 * slow.max())


def test_propagate_first_layer(circle, bank8, rng):
    f = Signal(rng.standard_normal(circle.n_nodes), circle)
    np.testing.assert_allclose(propagate(f, (2,), bank8).values,
                               np.abs(convolve(f, bank8.filter(2)).values))


def test_workers_do_not_change_results(circle, bank8, rng):
    f = Signal(rng.standard_normal(circle.n_nodes), circle)
    a = moments(f, bank8, 2, 1.5, workers=1).vector()
    b = moments(f, bank8, 2, 1.5, workers=4).vector()
    assert np.array_equal(a, b)


def test_homogeneity(circle, bank8, rng):
    f = Signal(rng.standard_normal(circle.n_nodes), circle)
    a = moments(f, bank8, 2, 1.5).vector()
    b = moments(-3.0 * f, bank8, 2, 1.5).vector()
    np.testing.assert_allclose(b, 3 * a, rtol=1e-12, atol=1e-15 * a.max())


def test_sparsity_drops_small_entries(circle, bank8):
    t = moments(Signal.from_function(np.cos, circle), bank8, 1, 2.0, sparsity=1e-3)
    assert t.sparse and len(t.entries) < 17
    assert t[(8,)] == 0.0


def test_csv_layout_and_roundtrip(circle, bank8):
    t = moments(Signal.from_function(np.cos, circle), bank8, 2, 1.5, metadata={"seed": 7})
    text = t.to_csv()
    rows = text.splitlines()
    assert rows[0] == "q,m,j_min,j_max,profile,C,n_modes,seed"
    assert rows[1] == "1.5,2,-8,8,exponential,1.0,65,7"
    assert rows[2] == "j1,j2,value"
    assert len(rows) == 3 + 17 ** 2
    back = MomentTable.from_csv(text)
    assert back.compatible(t) and not back.sparse
    assert np.array_equal(back.vector(), t.vector())


def test_norms(circle, bank8, rng):
    f = Signal(rng.standard_normal(circle.n_nodes), circle)
    a = moments(f, bank8, 1, 1.5)
    assert scattering_norm(a) == pytest.approx(np.linalg.norm(a.vector()))
    assert scattering_norm_power(a) == pytest.approx(scattering_norm(a) ** 1.5)
    assert scattering_norm(a, a) == 0
    with pytest.raises(ValueError, match="differ"):
        scattering_norm(a, moments(f, bank8, 1, 2.0))


def test_windowed_limit_normalization(circle, bank8):
    f = Signal.from_function(np.cos, circle)
    r = windowed_limit(f, (0,), bank8, J=60)
    assert r["spread"] < 1e-12
    assert r["relative_gap"] < 1e-12
    u1 = lq_norm(propagate(f, (0,), bank8), 1)
    assert r["value"] == pytest.approx(u1 / (2 * np.pi), rel=1e-12)
    assert r["unit_volume_limit"] == pytest.approx(r["value"] * np.sqrt(2 * np.pi), rel=1e-12)


def test_windowed_scattering_requires_path_below_window(circle, bank8):
    f = Signal.from_function(np.cos, circle)
    with pytest.raises(ValueError, match="above"):
        windowed_scattering(f, (3,), bank8, J=2)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), m=st.integers(1, 3))
def test_nonexpansive_property(seed, m):
    sp = build_circle_spectrum(33, 128)
    bank = build_wavelet_bank(make_profile("exponential"), sp, -4, 4)
    rng = np.random.default_rng(seed)
    f = Signal(rng.standard_normal(128), sp)
    g = Signal(f.values + rng.normal(0, 0.1, 128), sp)
    d = scattering_norm(moments(f, bank, m, 2.0), moments(g, bank, m, 2.0))
    assert d ** 2 <= lq_norm(f - g, 2) ** 2 * (1 + 1e-9)


def test_table_paths_are_lexicographic(circle, bank8):
    t = moments(Signal.from_function(np.cos, circle), bank8, 2, 2.0)
    assert list(t.paths()) == list(itertools.product(range(-8, 9), repeat=2))
