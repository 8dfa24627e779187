"""Propagator cascades, windowed scattering and nonwindowed scattering moments."""
from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .filters import WaveletBank, lowpass_filter
from .transform import Signal, convolve, lq_norm

DEFAULT_PATH_CAP = 100_000
CSV_KEYS = ("q", "m", "j_min", "j_max", "profile", "C", "n_modes", "seed")
CSV_EXTRA_KEYS = ("config",)


def check_path(path, bank: WaveletBank) -> tuple:
    path = tuple(int(j) for j in path)
    for j in path:
        bank.index(j)
    return path


def propagate(f: Signal, path, bank: WaveletBank) -> Signal:
    """U[j_1, ..., j_m] f = | ... | |f * psi_j1| * psi_j2 | ... * psi_jm |.

    The modulus is taken at the nodes; the next convolution re-analyzes the
    result, which projects it back onto the retained modes.
    """
    path = check_path(path, bank)
    u = f
    for j in path:
        u = Signal(np.abs(convolve(u, bank.filter(j)).values), f.spectrum)
    return u


def windowed_scattering(f: Signal, path, bank: WaveletBank, J: int) -> Signal:
    """S_J[path] f = U[path] f * phi_J, with every scale of the path <= J."""
    path = check_path(path, bank)
    if any(j > J for j in path):
        raise ValueError(f"path {path} has scales above the window J={J}")
    return convolve(propagate(f, path, bank), lowpass_filter(bank.profile, f.spectrum, J))


def windowed_limit(f: Signal, path, bank: WaveletBank, J: int = 60) -> dict:
    """Compare S_J[path] f at large J against the two candidate limits.

    For J large the low-pass filter keeps only the constant mode, so the
    pointwise limit is C vol^-1 ||U f||_1. The weaker normalization
    vol^-1/2 ||U f||_1 is reported alongside for comparison.
    """
    s = windowed_scattering(f, path, bank, J).values
    u1 = lq_norm(propagate(f, path, bank), 1.0)
    vol = f.spectrum.volume
    spectral = bank.profile.C * u1 / vol
    return {
        "J": J,
        "value": float(np.mean(s)),
        "spread": float(np.ptp(s)),
        "spectral_limit": spectral,
        "unit_volume_limit": u1 / np.sqrt(vol),
        "relative_gap": abs(float(np.mean(s)) - spectral) / spectral if spectral else 0.0,
    }


@dataclass
class MomentTable:
    """q-nonwindowed scattering moments over the full path grid of one order.

    ``entries`` maps a path (j_1, ..., j_m) to ||U[path] f||_q. When a
    sparsity threshold dropped entries, ``sparse`` is True and absent paths
    read as zero.
    """

    q: float
    m: int
    j_min: int
    j_max: int
    entries: dict
    sparse: bool = False
    metadata: dict = field(default_factory=dict)

    def paths(self):
        return itertools.product(range(self.j_min, self.j_max + 1), repeat=self.m)

    def vector(self) -> np.ndarray:
        return np.array([self.entries.get(p, 0.0) for p in self.paths()])

    def __getitem__(self, path):
        return self.entries.get(tuple(path), 0.0)

    def compatible(self, other: "MomentTable") -> bool:
        return (self.q, self.m, self.j_min, self.j_max) == (other.q, other.m, other.j_min, other.j_max)

    def to_csv(self, path=None) -> str:
        """CSV: metadata key row, metadata value row, column row, one row per path.

        A ``config`` metadata entry (the effective run configuration as
        compact JSON) is appended to the metadata rows when present.
        """
        keys = list(CSV_KEYS) + [k for k in CSV_EXTRA_KEYS if k in self.metadata]
        md = {"q": self.q, "m": self.m, "j_min": self.j_min, "j_max": self.j_max}
        md.update({k: self.metadata.get(k, "") for k in keys[4:]})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        w.writerow([_fmt(md[k]) for k in keys])
        w.writerow([f"j{i + 1}" for i in range(self.m)] + ["value"])
        for p in self.paths():
            if p in self.entries or not self.sparse:
                w.writerow(list(p) + [repr(float(self.entries.get(p, 0.0)))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> "MomentTable":
        rows = list(csv.reader(io.StringIO(text)))
        md = dict(zip(rows[0], rows[1]))
        m = int(md["m"])
        entries = {tuple(int(v) for v in r[:m]): float(r[m]) for r in rows[3:] if r}
        n_full = (int(md["j_max"]) - int(md["j_min"]) + 1) ** m
        meta = {k: v for k, v in md.items() if k not in ("q", "m", "j_min", "j_max")}
        return cls(float(md["q"]), m, int(md["j_min"]), int(md["j_max"]), entries,
                   sparse=len(entries) != n_full, metadata=meta)


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def _subtree(c0, j1_idx, bank: WaveletBank, m: int, q: float, track_loss: bool):
    """Level-by-level cascade below first scale j1; returns (norms, max relative projection loss).

    Columns at depth k are ordered lexicographically in (j_2, ..., j_k), so
    each propagator is computed once and reused for all its extensions.
    """
    sp = bank.spectrum
    E = sp.eigenfunctions
    w = sp.weights
    Psi = bank.coefficients
    U = np.abs(E @ (Psi[j1_idx] * c0))[:, None]
    loss = 0.0
    for _ in range(m - 1):
        C = E.T @ (w[:, None] * U)                      # (n_modes, P)
        if track_loss:
            full = w @ (U * U)
            kept = np.sum(C * C, axis=0)
            nz = full > 0
            if np.any(nz):
                loss = max(loss, float(np.max((full[nz] - kept[nz]) / full[nz])))
        # children of column p sit at p * S + s
        B = (Psi[:, :, None] * C[None, :, :]).transpose(1, 2, 0).reshape(C.shape[0], -1)
        U = np.abs(E @ B)
    if q == 2.0:
        norms = np.sqrt(w @ (U * U))
    else:
        norms = (w @ np.abs(U) ** q) ** (1.0 / q)
    return norms, loss


def moments(f: Signal, bank: WaveletBank, m: int, q: float,
            path_cap: int = DEFAULT_PATH_CAP, workers: int = 1,
            sparsity: float = 0.0, metadata: Optional[dict] = None) -> MomentTable:
    """All order-m moments ||U[j_1..j_m] f||_q over the bank's scale window.

    Parameters
    ----------
    m : int
        Order, at least 1.
    q : float
        Exponent in (1, 2]; q = 1 is also accepted for the classical L^1
        moments.
    path_cap : int
        Largest admissible grid size (j_max - j_min + 1)^m.
    workers : int
        Threads used across first-layer scales. Results do not depend on it.
    sparsity : float
        Drop entries below ``sparsity * max`` (flagged in the table).
    """
    if int(m) != m or m < 1:
        raise ValueError(f"order m must be a positive integer, got {m!r}")
    if not 1 <= q <= 2:
        raise ValueError(f"q must lie in (1, 2], got {q!r}")
    S = bank.n_scales
    if S ** m > path_cap:
        raise ValueError(f"{S}^{m} = {S ** m} paths exceeds the cap {path_cap}")
    c0 = f.coefficients
    q = float(q)

    def job(i):
        return _subtree(c0, i, bank, m, q, track_loss=True)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(job, range(S)))
    else:
        results = [job(i) for i in range(S)]

    values = np.concatenate([r[0] for r in results])
    loss = max(r[1] for r in results)
    paths = list(itertools.product(range(bank.j_min, bank.j_max + 1), repeat=m))
    entries = dict(zip(paths, values.tolist()))
    sparse = False
    if sparsity > 0:
        cut = sparsity * values.max()
        entries = {p: v for p, v in entries.items() if v >= cut}
        sparse = True
    md = {"profile": bank.profile.name, "C": bank.profile.C,
          "n_modes": f.spectrum.n_modes, "projection_loss": loss}
    if metadata:
        md.update(metadata)
    return MomentTable(q, int(m), bank.j_min, bank.j_max, entries, sparse, md)


def moments_naive(f: Signal, bank: WaveletBank, m: int, q: float) -> MomentTable:
    """Per-path recomputation through :func:`propagate`; slow reference."""
    entries = {}
    for p in itertools.product(range(bank.j_min, bank.j_max + 1), repeat=m):
        entries[p] = lq_norm(propagate(f, p, bank), q)
    return MomentTable(float(q), m, bank.j_min, bank.j_max, entries)


def scattering_norm(a: MomentTable, b: Optional[MomentTable] = None) -> float:
    """l^2 norm over the path grid of a - b (or of a alone)."""
    va = a.vector()
    if b is None:
        return float(np.linalg.norm(va))
    if not a.compatible(b):
        raise ValueError("moment tables differ in q, m or scale window")
    return float(np.linalg.norm(va - b.vector()))


def scattering_norm_power(a: MomentTable, b: Optional[MomentTable] = None) -> float:
    """The q-th power of :func:`scattering_norm`, as in the weighted measure."""
    return scattering_norm(a, b) ** a.q
