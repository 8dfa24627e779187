"""Laplace-Beltrami spectral data for analytic and sampled manifolds.

A :class:`Spectrum` bundles the retained eigenvalues, the eigenfunctions
sampled at quadrature nodes and the quadrature rule itself. Three builders
are provided: the unit circle, the flat torus S^1 x S^1 and a diffusion-maps
graph Laplacian for point clouds. Spectra can be cached to a small binary
file (see :func:`save_spectrum`).
"""
from __future__ import annotations

import hashlib
import logging
import struct
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph
import scipy.sparse.linalg
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

# basis function types for the real Fourier factors
CONST, COS, SIN = 0, 1, 2

MAGIC = b"GSPC"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIQQ")
_CHECKSUM_BYTES = 8


class SpectrumFormatError(ValueError):
    """Raised when a spectrum cache file is malformed."""


class UnsupportedVersionError(SpectrumFormatError):
    """Raised when a spectrum cache file has an unknown format version."""


def _readonly(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


def arc_distance(a, b):
    """Geodesic distance between angles on the unit circle."""
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b), TWO_PI))
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True, eq=False)
class QuadratureNodes:
    """Quadrature rule on a manifold.

    Parameters
    ----------
    points : ndarray, shape (N, d)
        Node positions in the ambient space.
    weights : ndarray, shape (N,)
        Positive quadrature weights; they sum to ``volume``.
    volume : float
        Riemannian volume (or its estimate for sampled manifolds).
    metric : callable, optional
        ``metric(i, j)`` returns geodesic distances between the nodes with
        index arrays ``i`` and ``j`` (broadcast together).
    coords : ndarray, optional
        Intrinsic coordinates (angles) of the nodes, available for analytic
        backends only. Shape (N,) on the circle and (N, 2) on the torus.
    """

    points: np.ndarray
    weights: np.ndarray
    volume: float
    metric: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    coords: Optional[np.ndarray] = None

    def __post_init__(self):
        w = self.weights
        if w.ndim != 1 or w.shape[0] != self.points.shape[0]:
            raise ValueError("weights must be one per node")
        if not np.all(w > 0):
            raise ValueError("quadrature weights must be strictly positive")
        if abs(w.sum() - self.volume) > 1e-9 * self.volume:
            raise ValueError(
                f"weights sum to {w.sum()!r}, declared volume is {self.volume!r}")

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]

    def distance(self, i, j) -> np.ndarray:
        if self.metric is None:
            raise ValueError("these nodes carry no geodesic distance")
        return self.metric(np.asarray(i), np.asarray(j))

    def distance_matrix(self) -> np.ndarray:
        idx = np.arange(self.n_nodes)
        return self.distance(idx[:, None], idx[None, :])


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Truncated Laplace-Beltrami eigendecomposition.

    ``eigenfunctions[i, n]`` is the n-th eigenfunction at node i.  ``modes``
    describes each analytic eigenfunction as a product of real Fourier
    factors, one ``(frequency, type)`` pair per axis; it is ``None`` for
    sampled or loaded spectra, which cannot be evaluated off the nodes.
    """

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    nodes: QuadratureNodes
    dimension: int
    kind: str = "loaded"
    modes: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        lam, E = self.eigenvalues, self.eigenfunctions
        if E.shape != (self.nodes.n_nodes, lam.shape[0]):
            raise ValueError(
                f"eigenfunction matrix has shape {E.shape}, expected "
                f"({self.nodes.n_nodes}, {lam.shape[0]})")
        if np.any(np.diff(lam) < 0):
            raise ValueError("eigenvalues must be nondecreasing")

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.nodes.n_nodes

    @property
    def weights(self) -> np.ndarray:
        return self.nodes.weights

    @property
    def volume(self) -> float:
        return self.nodes.volume

    @property
    def is_analytic(self) -> bool:
        return self.modes is not None

    def gram(self) -> np.ndarray:
        """Discrete Gram matrix of the sampled eigenfunctions."""
        E = self.eigenfunctions
        return E.T @ (self.weights[:, None] * E)

    def orthonormality_defect(self) -> float:
        return float(np.abs(self.gram() - np.eye(self.n_modes)).max())

    def evaluate(self, coords) -> np.ndarray:
        """Evaluate the retained eigenfunctions at arbitrary intrinsic coordinates.

        Returns an array of shape ``coords.shape[:-1] + (n_modes,)`` on the
        torus and ``coords.shape + (n_modes,)`` on the circle.
        """
        if self.modes is None:
            raise ValueError(
                f"{self.kind} spectrum has no closed-form eigenfunctions")
        coords = np.asarray(coords, dtype=float)
        if self.dimension == 1:
            coords = coords[..., None]
        out = np.ones(coords.shape[:-1] + (self.n_modes,))
        for axis in range(self.dimension):
            k = self.modes[:, axis, 0]
            t = self.modes[:, axis, 1]
            x = coords[..., axis, None]
            out = out * _fourier_factor(k, t, x)
        return out

    def eigenspace_complete(self) -> bool:
        """Whether the truncation keeps the last eigenspace whole.

        Only meaningful for analytic spectra, where multiplicities are
        known; sampled spectra always report True.
        """
        return bool(self.params.get("complete_eigenspaces", True))

    @cached_property
    def _fingerprint(self) -> bytes:
        h = hashlib.blake2b(digest_size=16)
        for a in (self.eigenvalues, self.eigenfunctions, self.weights):
            h.update(np.ascontiguousarray(a).tobytes())
        return h.digest()

    def same_as(self, other: "Spectrum") -> bool:
        return self is other or self._fingerprint == other._fingerprint


def _fourier_factor(k, t, x):
    """Orthonormal real Fourier functions on [0, 2pi)."""
    k = np.asarray(k)
    t = np.asarray(t)
    return np.where(
        t == CONST,
        1.0 / np.sqrt(TWO_PI),
        np.where(t == COS, np.cos(k * x), np.sin(k * x)) / np.sqrt(np.pi),
    )


def _circle_modes(n_modes: int) -> np.ndarray:
    modes = [(0, CONST)]
    k = 1
    while len(modes) < n_modes:
        modes += [(k, COS), (k, SIN)]
        k += 1
    return np.array(modes[:n_modes], dtype=np.int64)


def _check_counts(n_modes, n_nodes, max_freq, what="n_nodes"):
    if int(n_modes) != n_modes or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes!r}")
    if int(n_nodes) != n_nodes or n_nodes < 4:
        raise ValueError(f"{what} must be an integer >= 4, got {n_nodes!r}")
    if n_nodes < 4 * max_freq:
        raise ValueError(
            f"{what}={n_nodes} aliases frequency {max_freq}; need at least "
            f"{4 * max_freq}")


def circle_nodes(n_nodes: int) -> QuadratureNodes:
    """Uniform trapezoid nodes on the unit circle."""
    theta = TWO_PI * np.arange(n_nodes) / n_nodes

    def metric(i, j):
        return arc_distance(theta[i], theta[j])

    return QuadratureNodes(
        points=_readonly(np.c_[np.cos(theta), np.sin(theta)]),
        weights=_readonly(np.full(n_nodes, TWO_PI / n_nodes)),
        volume=TWO_PI,
        metric=metric,
        coords=_readonly(theta),
    )


def build_circle_spectrum(n_modes: int, n_nodes: int) -> Spectrum:
    """Spectrum of the unit circle.

    Modes are ordered 1, cos(theta), sin(theta), cos(2 theta), ... with
    eigenvalue k^2 for frequency k, normalized in L^2 with respect to arc
    length.

    Parameters
    ----------
    n_modes : int
        Number of retained eigenfunctions. An even count splits the last
        cos/sin pair, which breaks rotation equivariance of the truncation.
    n_nodes : int
        Number of uniform quadrature nodes; must be at least four times the
        largest retained frequency.
    """
    max_freq = n_modes // 2
    _check_counts(n_modes, n_nodes, max_freq)
    modes = _circle_modes(n_modes)
    nodes = circle_nodes(n_nodes)
    lam = modes[:, 0].astype(float) ** 2
    E = _fourier_factor(modes[:, 0], modes[:, 1], nodes.coords[:, None])
    complete = n_modes % 2 == 1
    if not complete:
        logger.warning("n_modes=%d splits the cos/sin pair at frequency %d",
                       n_modes, max_freq)
    return Spectrum(
        eigenvalues=_readonly(lam),
        eigenfunctions=_readonly(E),
        nodes=nodes,
        dimension=1,
        kind="circle",
        modes=_readonly(modes[:, None, :], dtype=np.int64),
        params={"n_modes": n_modes, "n_nodes": n_nodes,
                "complete_eigenspaces": complete},
    )


def torus_nodes(n_per_axis: int) -> QuadratureNodes:
    """Tensor grid of uniform nodes on the flat torus, row-major in (theta1, theta2)."""
    theta = TWO_PI * np.arange(n_per_axis) / n_per_axis
    t1, t2 = np.meshgrid(theta, theta, indexing="ij")
    coords = np.c_[t1.ravel(), t2.ravel()]

    def metric(i, j):
        d1 = arc_distance(coords[i, 0], coords[j, 0])
        d2 = arc_distance(coords[i, 1], coords[j, 1])
        return np.hypot(d1, d2)

    points = np.c_[np.cos(coords[:, 0]), np.sin(coords[:, 0]),
                   np.cos(coords[:, 1]), np.sin(coords[:, 1])]
    n = coords.shape[0]
    return QuadratureNodes(
        points=_readonly(points),
        weights=_readonly(np.full(n, (TWO_PI / n_per_axis) ** 2)),
        volume=TWO_PI ** 2,
        metric=metric,
        coords=_readonly(coords),
    )


def _torus_modes(n_modes: int):
    kmax = 0
    while True:
        kmax += 1
        factors = [(0, CONST)] + [(k, t) for k in range(1, kmax + 1)
                                  for t in (COS, SIN)]
        rows = [(k1 * k1 + k2 * k2, k1, k2, t1, t2)
                for (k1, t1) in factors for (k2, t2) in factors]
        rows.sort()
        # every eigenvalue up to kmax^2 is fully represented on this box
        if len(rows) >= n_modes and rows[n_modes - 1][0] <= kmax * kmax:
            break
    kept = rows[:n_modes]
    complete = n_modes == len(rows) or rows[n_modes][0] > kept[-1][0]
    lam = np.array([r[0] for r in kept], dtype=float)
    modes = np.array([[[r[1], r[3]], [r[2], r[4]]] for r in kept], dtype=np.int64)
    return lam, modes, complete


def build_torus_spectrum(n_modes: int, n_nodes_per_axis: int) -> Spectrum:
    """Spectrum of the flat torus S^1 x S^1 with product eigenfunctions.

    Eigenvalues are k1^2 + k2^2. Ties are broken by ascending frequency
    pair and then cos before sin, so the ordering is deterministic.
    """
    if int(n_modes) != n_modes or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes!r}")
    lam, modes, complete = _torus_modes(n_modes)
    max_freq = int(modes[:, :, 0].max())
    _check_counts(n_modes, n_nodes_per_axis, max_freq, what="n_nodes_per_axis")
    nodes = torus_nodes(n_nodes_per_axis)
    E = (_fourier_factor(modes[:, 0, 0], modes[:, 0, 1], nodes.coords[:, 0, None])
         * _fourier_factor(modes[:, 1, 0], modes[:, 1, 1], nodes.coords[:, 1, None]))
    if not complete:
        logger.warning("n_modes=%d splits the eigenspace at lambda=%g",
                       n_modes, lam[-1])
    return Spectrum(
        eigenvalues=_readonly(lam),
        eigenfunctions=_readonly(E),
        nodes=nodes,
        dimension=2,
        kind="torus",
        modes=_readonly(modes, dtype=np.int64),
        params={"n_modes": n_modes, "n_nodes_per_axis": n_nodes_per_axis,
                "complete_eigenspaces": complete},
    )


# ---------------------------------------------------------------------------
# point clouds


def read_points(path) -> np.ndarray:
    """Read a point cloud: one point per line, whitespace or comma separated.

    Lines starting with ``#`` and blank lines are skipped.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"point-cloud file not found: {path}")
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            rows.append([float(v) for v in s.replace(",", " ").split()])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: cannot parse {s!r}") from exc
    if not rows:
        raise ValueError(f"{path}: no points")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: rows have inconsistent column counts")
    return np.array(rows, dtype=float)


def estimate_dimension(points, bandwidth: float) -> int:
    """Intrinsic dimension from how kernel degrees scale with bandwidth."""
    D2 = cdist(points, points, "sqeuclidean")
    d1 = np.exp(-D2 / bandwidth ** 2).sum(1)
    d2 = np.exp(-D2 / (2.0 * bandwidth) ** 2).sum(1)
    n = np.median(np.log2(d2 / d1))
    return max(1, int(round(n)))


def _signs_fixed(V):
    # flip each column so its largest-magnitude entry is positive
    idx = np.argmax(np.abs(V), axis=0)
    s = np.sign(V[idx, np.arange(V.shape[1])])
    s[s == 0] = 1.0
    return V * s


def build_pointcloud_spectrum(points, n_modes: int, bandwidth: float,
                              dimension: Optional[int] = None,
                              dense_limit: int = 4096,
                              seed: int = 0) -> Spectrum:
    """Approximate Laplace-Beltrami spectrum of a sampled manifold.

    Uses a Gaussian kernel ``exp(-|x - y|^2 / bandwidth^2)`` with the
    diffusion-maps alpha=1 density normalization, then the symmetric
    normalization of the resulting Markov operator P. Eigenvalues of
    ``I - P`` are scaled by ``4 / bandwidth^2`` so they approximate those of
    the Laplace-Beltrami operator.

    Parameters
    ----------
    points : array_like, shape (N, d)
    n_modes : int
        Number of smallest eigenpairs to keep.
    bandwidth : float
        Kernel width, in the units of ``points``. It should be several
        times the typical nearest-neighbour spacing.
    dimension : int, optional
        Intrinsic dimension; estimated from the kernel when omitted.
    dense_limit : int
        Above this many points a sparse Lanczos solve replaces the dense one.
    seed : int
        Seeds the Lanczos start vector, so sparse solves are reproducible.

    Returns
    -------
    Spectrum
        Uniform quadrature weights ``volume / N``; eigenfunctions are
        normalized against those weights, so their Gram matrix is close to
        (but not exactly) the identity on non-uniform samples.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise ValueError("points must be a 2-d array (N, d)")
    N = X.shape[0]
    if int(n_modes) != n_modes or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes!r}")
    if N < n_modes + 1:
        raise ValueError(f"need at least n_modes + 1 = {n_modes + 1} points, got {N}")
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth!r}")
    h = float(bandwidth)
    if dimension is None:
        dimension = estimate_dimension(X, h)

    cutoff = 6.0 * h  # exp(-36) is below round-off relative to the diagonal
    tree = cKDTree(X)
    Dsp = tree.sparse_distance_matrix(tree, cutoff, output_type="coo_matrix")
    # self pairs may or may not be stored; drop them and add the diagonal once
    off = Dsp.row != Dsp.col
    Dsp = scipy.sparse.coo_matrix((Dsp.data[off], (Dsp.row[off], Dsp.col[off])), shape=(N, N))
    K = scipy.sparse.coo_matrix(
        (np.exp(-Dsp.data ** 2 / h ** 2), (Dsp.row, Dsp.col)), shape=(N, N)).tocsr()
    K = (K + scipy.sparse.identity(N, format="csr")).tocsr()
    degree = np.asarray(K.sum(axis=1)).ravel()

    n_comp, _ = scipy.sparse.csgraph.connected_components(K, directed=False)
    if n_comp > 1:
        raise ValueError(
            f"neighborhood graph has {n_comp} components at bandwidth {h}; "
            "increase the bandwidth")

    Dinv = scipy.sparse.diags(1.0 / degree)
    K1 = (Dinv @ K @ Dinv).tocsr()
    d1 = np.asarray(K1.sum(axis=1)).ravel()
    S_half = scipy.sparse.diags(1.0 / np.sqrt(d1))
    S = (S_half @ K1 @ S_half).tocsr()
    S = 0.5 * (S + S.T)

    if N <= dense_limit:
        mu, V = scipy.linalg.eigh(S.toarray(), subset_by_index=[N - n_modes, N - 1])
    else:
        # shift-invert on I - S: plain Lanczos on S tends to return one copy
        # of each degenerate eigenvalue, shift-invert converges on all of them
        v0 = np.random.default_rng(seed).standard_normal(N)
        L = (scipy.sparse.identity(N, format="csc") - S).tocsc()
        try:
            ev, V = scipy.sparse.linalg.eigsh(L, k=n_modes, sigma=-1e-3, which="LM",
                                              v0=v0, tol=1e-12, maxiter=50 * N)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise RuntimeError("eigensolver did not converge") from exc
        mu = 1.0 - ev
    order = np.argsort(-mu, kind="stable")
    mu, V = mu[order], V[:, order]

    lam = (1.0 - mu) * 4.0 / h ** 2
    if abs(lam[0]) > 1e-8:
        raise RuntimeError(f"lowest eigenvalue {lam[0]:.3e} is not zero")
    lam[0] = 0.0
    lam = np.maximum.accumulate(np.maximum(lam, 0.0))

    # volume from the kernel density estimate: sum_i (pi h^2)^(n/2) / degree_i
    volume = float(np.sum((np.pi * h * h) ** (dimension / 2.0) / degree))
    w = np.full(N, volume / N)
    psi = V / np.sqrt(d1)[:, None]
    psi = psi / np.sqrt((w[:, None] * psi ** 2).sum(axis=0))
    psi = _signs_fixed(psi)
    psi[:, 0] = 1.0 / np.sqrt(volume)  # constant up to round-off already

    # geodesics from edges no longer than h: long chords cut corners by a
    # relative (length / curvature radius)^2 / 24
    short = Dsp.data <= h
    graph = scipy.sparse.coo_matrix((Dsp.data[short], (Dsp.row[short], Dsp.col[short])),
                                    shape=(N, N)).tocsr()
    if scipy.sparse.csgraph.connected_components(graph, directed=False)[0] > 1:
        graph = scipy.sparse.coo_matrix((Dsp.data, (Dsp.row, Dsp.col)), shape=(N, N)).tocsr()
    holder = {}

    def metric(i, j):
        if "D" not in holder:
            holder["D"] = scipy.sparse.csgraph.shortest_path(graph, directed=False)
        return holder["D"][i, j]

    nodes = QuadratureNodes(points=_readonly(X), weights=_readonly(w),
                            volume=volume, metric=metric)
    return Spectrum(
        eigenvalues=_readonly(lam),
        eigenfunctions=_readonly(psi),
        nodes=nodes,
        dimension=int(dimension),
        kind="pointcloud",
        params={"n_modes": n_modes, "bandwidth": h, "n_points": N},
    )


# ---------------------------------------------------------------------------
# persistence


def _checksum(payload: bytes) -> bytes:
    return hashlib.blake2b(payload, digest_size=_CHECKSUM_BYTES).digest()


def save_spectrum(spectrum: Spectrum, path) -> None:
    """Write ``spectrum`` to the binary cache format.

    Layout (little-endian): magic ``GSPC``, u32 version, u32 dimension,
    u64 n_nodes, u64 n_modes, float64 weights, float64 eigenvalues,
    float64 eigenfunctions (row-major), then an 8-byte BLAKE2b checksum of
    everything before it.
    """
    body = bytearray(_HEADER.pack(MAGIC, FORMAT_VERSION, spectrum.dimension,
                                  spectrum.n_nodes, spectrum.n_modes))
    for a in (spectrum.weights, spectrum.eigenvalues, spectrum.eigenfunctions):
        body += np.ascontiguousarray(a, dtype="<f8").tobytes()
    body += _checksum(bytes(body))
    Path(path).write_bytes(bytes(body))


def load_spectrum(path, nodes: Optional[QuadratureNodes] = None) -> Spectrum:
    """Read a spectrum written by :func:`save_spectrum`.

    The file holds no node coordinates or metric, so the result has
    ``kind="loaded"``. Pass ``nodes`` (e.g. from :func:`circle_nodes`) to
    reattach them; their weights must match the stored ones exactly.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size + _CHECKSUM_BYTES:
        raise SpectrumFormatError(f"{path}: truncated header")
    magic, version, dim, n_nodes, n_modes = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SpectrumFormatError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"{path}: unsupported format version {version}")
    n_floats = n_nodes + n_modes + n_nodes * n_modes
    expected = _HEADER.size + 8 * n_floats + _CHECKSUM_BYTES
    if len(data) != expected:
        raise SpectrumFormatError(
            f"{path}: expected {expected} bytes, found {len(data)} (truncated?)")
    if _checksum(data[:-_CHECKSUM_BYTES]) != data[-_CHECKSUM_BYTES:]:
        raise SpectrumFormatError(f"{path}: checksum mismatch")
    flat = np.frombuffer(data, dtype="<f8", count=n_floats, offset=_HEADER.size)
    w = flat[:n_nodes]
    lam = flat[n_nodes:n_nodes + n_modes]
    E = flat[n_nodes + n_modes:].reshape(n_nodes, n_modes)

    if nodes is None:
        nodes = QuadratureNodes(points=_readonly(np.zeros((n_nodes, 0))),
                                weights=_readonly(w), volume=float(w.sum()))
    elif nodes.n_nodes != n_nodes or not np.array_equal(nodes.weights, w):
        raise ValueError("supplied nodes do not match the cached quadrature weights")
    return Spectrum(eigenvalues=_readonly(lam), eigenfunctions=_readonly(E),
                    nodes=nodes, dimension=int(dim), kind="loaded")


def restore_analytic(loaded: Spectrum, kind: str, n_nodes: int) -> Spectrum:
    """Reattach nodes, mode labels and kind to a cached circle or torus spectrum.

    ``n_nodes`` is the node count (circle) or per-axis node count (torus).
    """
    n_modes = loaded.n_modes
    if kind == "circle":
        modes = _circle_modes(n_modes)[:, None, :]
        lam = modes[:, 0, 0].astype(float) ** 2
        nodes = circle_nodes(n_nodes)
        params = {"n_modes": n_modes, "n_nodes": n_nodes,
                  "complete_eigenspaces": n_modes % 2 == 1}
    elif kind == "torus":
        lam, modes, complete = _torus_modes(n_modes)
        nodes = torus_nodes(n_nodes)
        params = {"n_modes": n_modes, "n_nodes_per_axis": n_nodes,
                  "complete_eigenspaces": complete}
    else:
        raise ValueError(f"no analytic backend named {kind!r}")
    if nodes.n_nodes != loaded.n_nodes or not np.array_equal(lam, loaded.eigenvalues):
        raise SpectrumFormatError(f"cached spectrum does not match a {kind} spectrum")
    if not np.array_equal(nodes.weights, loaded.weights):
        raise SpectrumFormatError("cached quadrature weights do not match")
    return replace(loaded, nodes=nodes, kind=kind,
                   modes=_readonly(modes, dtype=np.int64), params=params)
