import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from manifold_scattering.spectra import (
    TWO_PI, SpectrumFormatError, UnsupportedVersionError, arc_distance,
    build_circle_spectrum, build_pointcloud_spectrum, build_torus_spectrum,
    circle_nodes, estimate_dimension, load_spectrum, read_points, restore_analytic,
    save_spectrum,
)


def test_circle_eigenvalues_are_squares():
    sp = build_circle_spectrum(9, 256)
    np.testing.assert_array_equal(sp.eigenvalues, [0, 1, 1, 4, 4, 9, 9, 16, 16])


def test_circle_orthonormal(circle):
    assert circle.orthonormality_defect() < 1e-13


def test_circle_eigenfunctions_match_fourier(circle):
    th = circle.nodes.coords
    E = circle.eigenfunctions
    np.testing.assert_allclose(E[:, 0], 1 / np.sqrt(TWO_PI))
    np.testing.assert_allclose(E[:, 1], np.cos(th) / np.sqrt(np.pi), atol=1e-14)
    np.testing.assert_allclose(E[:, 4], np.sin(2 * th) / np.sqrt(np.pi), atol=1e-14)


def test_circle_rejects_aliasing():
    with pytest.raises(ValueError, match="aliases"):
        build_circle_spectrum(65, 64)


def test_even_mode_count_splits_pair(caplog):
    sp = build_circle_spectrum(4, 64)
    assert not sp.params["complete_eigenspaces"]
    assert not sp.eigenspace_complete()
    assert "splits" in caplog.text


def test_torus_eigenvalues_sorted_and_complete(torus):
    lam = torus.eigenvalues
    assert np.all(np.diff(lam) >= 0)
    # 1 + 4 + 4 + 4 + 8 + 4 + 8 + ... counts up to lambda = 20
    assert lam[0] == 0 and np.sum(lam == 1) == 4 and np.sum(lam == 2) == 4
    assert torus.params["complete_eigenspaces"]
    assert torus.orthonormality_defect() < 1e-12


def test_torus_ordering_deterministic():
    a = build_torus_spectrum(25, 16)
    b = build_torus_spectrum(25, 16)
    np.testing.assert_array_equal(a.modes, b.modes)
    np.testing.assert_array_equal(a.eigenfunctions, b.eigenfunctions)


def test_evaluate_reproduces_nodes(torus):
    np.testing.assert_allclose(torus.evaluate(torus.nodes.coords), torus.eigenfunctions, atol=1e-13)


def test_arc_distance():
    assert arc_distance(0.1, TWO_PI - 0.1) == pytest.approx(0.2)
    assert arc_distance(0.0, np.pi) == pytest.approx(np.pi)


def test_circle_distance_matrix_symmetric():
    nodes = circle_nodes(16)
    D = nodes.distance_matrix()
    np.testing.assert_allclose(D, D.T)
    assert D[0, 8] == pytest.approx(np.pi)


@settings(max_examples=15, deadline=None)
@given(n_modes=st.integers(1, 20).map(lambda k: 2 * k + 1), extra=st.integers(0, 40))
def test_gram_is_identity_whenever_unaliased(n_modes, extra):
    n_nodes = 4 * (n_modes // 2) + 4 + extra
    sp = build_circle_spectrum(n_modes, n_nodes)
    assert sp.orthonormality_defect() < 1e-12


# ---------------------------------------------------------------------------
# point clouds


def _ring(N):
    th = TWO_PI * np.arange(N) / N
    return np.c_[np.cos(th), np.sin(th)]


def test_pointcloud_approximates_circle():
    sp = build_pointcloud_spectrum(_ring(512), 5, 6 * TWO_PI / 512)
    np.testing.assert_allclose(sp.eigenvalues, [0, 1, 1, 4, 4], rtol=1e-2, atol=1e-12)
    assert sp.dimension == 1
    assert sp.volume == pytest.approx(TWO_PI, rel=1e-2)
    assert sp.orthonormality_defect() < 1e-10


def test_pointcloud_error_shrinks_with_density():
    errs = []
    for N in (256, 512, 1024):
        sp = build_pointcloud_spectrum(_ring(N), 3, 6 * TWO_PI / N)
        errs.append(abs(sp.eigenvalues[1] - 1.0))
    assert errs[0] > errs[1] > errs[2]


def test_pointcloud_sparse_solver_matches_dense():
    X = _ring(300)
    h = 6 * TWO_PI / 300
    dense = build_pointcloud_spectrum(X, 5, h)
    sparse = build_pointcloud_spectrum(X, 5, h, dense_limit=10, seed=3)
    np.testing.assert_allclose(sparse.eigenvalues, dense.eigenvalues, atol=1e-8)


def test_pointcloud_geodesics_close_to_arcs():
    sp = build_pointcloud_spectrum(_ring(256), 3, 6 * TWO_PI / 256)
    assert sp.nodes.distance(0, 128) == pytest.approx(np.pi, rel=2e-3)


def test_pointcloud_disconnected_raises():
    X = np.r_[_ring(64), _ring(64) + 10.0]
    with pytest.raises(ValueError, match="components"):
        build_pointcloud_spectrum(X, 3, 0.3)


def test_estimate_dimension():
    g = np.linspace(0, 1, 40)
    plane = np.array([(x, y, 0.0) for x in g for y in g])
    assert estimate_dimension(plane, 0.08) == 2
    assert estimate_dimension(_ring(400), 6 * TWO_PI / 400) == 1


def test_read_points(tmp_path):
    p = tmp_path / "pts.txt"
    p.write_text("# header\n1.0, 2.0\n3 4\n\n")
    np.testing.assert_array_equal(read_points(p), [[1, 2], [3, 4]])
    with pytest.raises(FileNotFoundError, match="missing.txt"):
        read_points(tmp_path / "missing.txt")


# ---------------------------------------------------------------------------
# persistence


def test_save_load_roundtrip(tmp_path, circle):
    path = tmp_path / "c.gspc"
    save_spectrum(circle, path)
    loaded = load_spectrum(path)
    assert loaded.kind == "loaded" and not loaded.is_analytic
    np.testing.assert_array_equal(loaded.eigenfunctions, circle.eigenfunctions)
    restored = restore_analytic(loaded, "circle", 256)
    assert restored.kind == "circle" and restored.same_as(circle)
    np.testing.assert_array_equal(restored.modes, circle.modes)


@pytest.mark.parametrize("mutate, error, match", [
    (lambda b: b"XXXX" + b[4:], SpectrumFormatError, "magic"),
    (lambda b: b[:4] + (7).to_bytes(4, "little") + b[8:], UnsupportedVersionError, "version"),
    (lambda b: b[:-20], SpectrumFormatError, "truncated"),
    (lambda b: b[:40] + bytes([b[40] ^ 1]) + b[41:], SpectrumFormatError, "checksum"),
])
def test_load_rejects_bad_files(tmp_path, mutate, error, match):
    path = tmp_path / "s.gspc"
    save_spectrum(build_circle_spectrum(5, 32), path)
    path.write_bytes(mutate(path.read_bytes()))
    with pytest.raises(error, match=match):
        load_spectrum(path)


def test_restore_rejects_wrong_kind(tmp_path):
    path = tmp_path / "t.gspc"
    save_spectrum(build_torus_spectrum(9, 8), path)
    with pytest.raises(SpectrumFormatError):
        restore_analytic(load_spectrum(path), "circle", 64)


def test_spectrum_validates_shapes(circle):
    with pytest.raises(ValueError, match="shape"):
        dataclasses.replace(circle, eigenvalues=circle.eigenvalues[:-1])
