"""Point maps on the circle and torus and their action on signals."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..spectra import TWO_PI, Spectrum, arc_distance
from ..transform import Signal

ISOMETRY = "isometry"
DIFFEOMORPHISM = "diffeomorphism"


@dataclass(frozen=True)
class PointMap:
    """A map xi of the manifold, acting on intrinsic (angle) coordinates.

    ``forward`` and ``inverse`` take arrays of coordinates shaped like
    ``spectrum.nodes.coords``.
    """

    kind: str
    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    sup_displacement: float
    manifold: str = "circle"
    name: str = ""

    def check(self, spectrum: Spectrum, n_pairs: int = 1000, seed: int = 0,
              tol: float = 1e-10) -> None:
        """Verify inverse(forward(x)) = x on the nodes, and distance
        preservation on random node pairs for isometries."""
        x = _coords(spectrum, self)
        back = self.inverse(self.forward(x))
        err = _wrapped_error(back, x)
        if err > tol:
            raise ValueError(f"{self.name}: inverse(forward(x)) off by {err:.3e}")
        if self.kind == ISOMETRY:
            rng = np.random.default_rng(seed)
            i = rng.integers(0, spectrum.n_nodes, n_pairs)
            j = rng.integers(0, spectrum.n_nodes, n_pairs)
            y = self.forward(x)
            d0 = _geodesic(x[i], x[j])
            d1 = _geodesic(y[i], y[j])
            if np.max(np.abs(d0 - d1)) > tol:
                raise ValueError(f"{self.name}: map does not preserve distances")


def _geodesic(a, b):
    if a.ndim == 1:
        return arc_distance(a, b)
    return np.hypot(arc_distance(a[:, 0], b[:, 0]), arc_distance(a[:, 1], b[:, 1]))


def _wrapped_error(a, b) -> float:
    return float(np.max(arc_distance(a, b))) if a.size else 0.0


def _coords(spectrum: Spectrum, xi: PointMap) -> np.ndarray:
    coords = spectrum.nodes.coords
    if coords is None:
        raise ValueError(f"{spectrum.kind} spectrum has no intrinsic coordinates; "
                         "point maps need an analytic backend")
    expected = 1 if xi.manifold == "circle" else 2
    if spectrum.dimension != expected:
        raise ValueError(f"{xi.name} acts on the {xi.manifold}, "
                         f"spectrum has dimension {spectrum.dimension}")
    return coords


def identity_map(manifold: str = "circle") -> PointMap:
    return PointMap(ISOMETRY, lambda x: np.array(x, copy=True),
                    lambda x: np.array(x, copy=True), 0.0, manifold, "identity")


def rotation(angle: float) -> PointMap:
    """theta -> theta + angle on the circle."""
    a = float(angle)
    return PointMap(ISOMETRY, lambda x: np.mod(x + a, TWO_PI),
                    lambda x: np.mod(x - a, TWO_PI),
                    float(arc_distance(a, 0.0)), "circle", f"rotation({a!r})")


def reflection() -> PointMap:
    """theta -> -theta on the circle."""
    return PointMap(ISOMETRY, lambda x: np.mod(-x, TWO_PI),
                    lambda x: np.mod(-x, TWO_PI), np.pi, "circle", "reflection")


def torus_translation(a1: float, a2: float) -> PointMap:
    shift = np.array([a1, a2], dtype=float)
    return PointMap(ISOMETRY, lambda x: np.mod(x + shift, TWO_PI),
                    lambda x: np.mod(x - shift, TWO_PI),
                    float(np.hypot(arc_distance(a1, 0.0), arc_distance(a2, 0.0))),
                    "torus", f"translation({a1!r}, {a2!r})")


def torus_swap() -> PointMap:
    """(theta1, theta2) -> (theta2, theta1)."""
    def swap(x):
        return np.array(x[:, ::-1], copy=True)
    return PointMap(ISOMETRY, swap, swap, np.pi * np.sqrt(2.0), "torus", "swap")


def sine_diffeomorphism(t: float, harmonic: int = 1, newton_steps: int = 60) -> PointMap:
    """xi_t(theta) = theta + (t / k) sin(k theta), a diffeomorphism for |t| < 1.

    ``k`` is ``harmonic``. The sup displacement is |t| / k and the inverse
    is computed by Newton's method.
    """
    t = float(t)
    k = int(harmonic)
    if k < 1:
        raise ValueError(f"harmonic must be a positive integer, got {harmonic!r}")
    if not abs(t) < 1:
        raise ValueError(f"theta + t sin(theta) is not invertible for |t| = {abs(t)}")
    a = t / k

    def forward(x):
        return np.mod(x + a * np.sin(k * x), TWO_PI)

    def inverse(x):
        y = np.array(x, dtype=float, copy=True)
        for _ in range(newton_steps):
            step = (y + a * np.sin(k * y) - x) / (1.0 + t * np.cos(k * y))
            y -= step
            if np.max(np.abs(step), initial=0.0) < 1e-15:
                break
        return np.mod(y, TWO_PI)

    kind = ISOMETRY if t == 0 else DIFFEOMORPHISM
    name = f"sine_diffeomorphism({t!r})" if k == 1 else f"sine_diffeomorphism({t!r}, {k})"
    return PointMap(kind, forward, inverse, abs(a), "circle", name)


def _node_indices(spectrum: Spectrum, coords) -> np.ndarray | None:
    """Indices of grid nodes at ``coords`` if every point is a node, else None."""
    if spectrum.kind not in ("circle", "torus"):
        return None
    n = spectrum.params["n_nodes"] if spectrum.kind == "circle" else spectrum.params["n_nodes_per_axis"]
    s = np.asarray(coords) * n / TWO_PI
    k = np.rint(s)
    if np.max(np.abs(s - k), initial=0.0) > 1e-9:
        return None
    k = np.mod(k.astype(np.int64), n)
    return k if spectrum.kind == "circle" else k[:, 0] * n + k[:, 1]


def apply_action(f: Signal, xi: PointMap) -> Signal:
    """V_xi f(x) = f(xi^-1 x) at every node.

    When xi^-1 maps nodes onto nodes (grid rotations, swaps) the values
    are permuted exactly; otherwise ``f`` is evaluated off the grid by
    synthesis from its retained coefficients, which is exact for
    bandlimited signals.
    """
    sp = f.spectrum
    pre = xi.inverse(_coords(sp, xi))
    idx = _node_indices(sp, pre)
    if idx is not None:
        return Signal(f.values[idx], sp)
    if not np.all(np.isfinite(pre)):
        raise ValueError(f"{xi.name} is undefined at some nodes")
    return Signal(sp.evaluate(pre) @ f.coefficients, sp)


def bandlimit_project(f: Signal, lam: float) -> Signal:
    """Keep only modes with eigenvalue strictly below ``lam``."""
    keep = f.spectrum.eigenvalues < lam
    c = np.where(keep, f.coefficients, 0.0)
    return Signal(f.spectrum.eigenfunctions @ c, f.spectrum, c)


def is_bandlimited(f: Signal, lam: float, tol: float = 1e-10) -> bool:
    c = f.coefficients
    high = f.spectrum.eigenvalues >= lam
    scale = np.linalg.norm(c)
    return bool(scale == 0 or np.linalg.norm(c[high]) <= tol * scale)
