"""Low-pass profiles, dilated low-pass filters and diffusion wavelet banks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectra import Spectrum
from .transform import SpectralFilter

PROFILE_KINDS = ("exponential", "gaussian")

# radicands in (-RADICAND_CLAMP, 0) are round-off and become 0
RADICAND_CLAMP = 1e-15


class NonMonotoneProfileError(ValueError):
    pass


@dataclass(frozen=True)
class LowPassProfile:
    """A nonnegative, nonincreasing profile G with G(0) = C.

    Only a fixed set of kinds is supported so that run metadata fully
    describes the filters; add a branch to :meth:`__call__` to extend it.
    """

    name: str
    C: float

    def __post_init__(self):
        if self.name not in PROFILE_KINDS:
            raise ValueError(f"unknown profile {self.name!r}; choose from {PROFILE_KINDS}")
        if not self.C > 0:
            raise ValueError(f"profile constant C must be positive, got {self.C!r}")

    @property
    def zero_value(self) -> float:
        return self.C

    @property
    def schwartz(self) -> bool:
        # both supported kinds are Schwartz on the half line
        return True

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.name == "exponential":
            return self.C * np.exp(-x)
        return self.C * np.exp(-x * x)

    def check(self, n_grid: int = 10_000, x_max: float = 2.0 ** 40) -> None:
        """Scan a grid of [0, x_max] for sign, monotonicity and decay."""
        x = np.concatenate([[0.0], np.geomspace(1e-12, x_max, n_grid - 1)])
        g = self(x)
        if np.any(g < 0):
            raise NonMonotoneProfileError(f"{self.name}: profile takes negative values")
        if np.any(np.diff(g) > 0):
            raise NonMonotoneProfileError(f"{self.name}: profile increases somewhere")
        if g[0] != self.C:
            raise NonMonotoneProfileError(f"{self.name}: G(0) != C")
        if not self(x_max) < 1e-12 * self.C:
            raise NonMonotoneProfileError(f"{self.name}: profile does not decay to 0")


def make_profile(kind: str, C: float = 1.0) -> LowPassProfile:
    """``exponential``: G(x) = C exp(-x); ``gaussian``: G(x) = C exp(-x^2)."""
    return LowPassProfile(kind, float(C))


def wavelet_response(profile: LowPassProfile, x) -> np.ndarray:
    """Band-pass response sqrt(G(x/2)^2 - G(x)^2) at dilated frequency x."""
    x = np.asarray(x, dtype=float)
    rad = profile(0.5 * x) ** 2 - profile(x) ** 2
    if np.any(rad < -RADICAND_CLAMP):
        raise NonMonotoneProfileError(
            f"negative radicand {rad.min():.3e}: profile is not monotone")
    return np.sqrt(np.maximum(rad, 0.0))


@dataclass(frozen=True, eq=False)
class WaveletBank:
    """Diffusion wavelets psi_j for j in [j_min, j_max] on one spectrum.

    ``coefficients[j - j_min, n]`` is the response of psi_j at the n-th
    eigenvalue. Coefficients are functions of the eigenvalue alone, so
    they are identical across an eigenspace.
    """

    profile: LowPassProfile
    j_min: int
    j_max: int
    spectrum: Spectrum
    coefficients: np.ndarray

    @property
    def scales(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def n_scales(self) -> int:
        return self.j_max - self.j_min + 1

    def index(self, j: int) -> int:
        if not self.j_min <= j <= self.j_max:
            raise ValueError(f"scale {j} outside window [{self.j_min}, {self.j_max}]")
        return int(j) - self.j_min

    def filter(self, j: int) -> SpectralFilter:
        return SpectralFilter(self.coefficients[self.index(j)], self.spectrum)


def build_wavelet_bank(profile: LowPassProfile, spectrum: Spectrum,
                       j_min: int = -20, j_max: int = 20) -> WaveletBank:
    """Evaluate psi_j(n) = [G(2^(j-1) lam_n)^2 - G(2^j lam_n)^2]^(1/2) on the window."""
    if j_min > j_max:
        raise ValueError(f"empty scale window [{j_min}, {j_max}]")
    profile.check()
    js = np.arange(j_min, j_max + 1, dtype=float)
    x = np.ldexp(1.0, js.astype(int))[:, None] * spectrum.eigenvalues[None, :]
    coef = wavelet_response(profile, x)
    coef.flags.writeable = False
    return WaveletBank(profile, int(j_min), int(j_max), spectrum, coef)


def lowpass_filter(profile: LowPassProfile, spectrum: Spectrum, J: int) -> SpectralFilter:
    """phi_J(n) = G(2^J lam_n)."""
    return SpectralFilter(profile(np.ldexp(1.0, int(J)) * spectrum.eigenvalues), spectrum)


def frame_defect(bank: WaveletBank) -> np.ndarray:
    """C^2 minus the windowed sum of squared wavelet responses, per mode.

    By telescoping this equals C^2 - G(2^(j_min-1) lam)^2 + G(2^j_max lam)^2:
    the low-scale deficit plus the high-scale tail. At lam = 0 it is C^2,
    since constants are carried by the low-pass filter alone.
    """
    return bank.profile.C ** 2 - np.sum(bank.coefficients ** 2, axis=0)


def telescoped_sum(profile: LowPassProfile, lam, j_min: int, j_max: int) -> np.ndarray:
    """Closed form of sum_{j=j_min}^{j_max} psi_j(lam)^2."""
    lam = np.asarray(lam, dtype=float)
    return profile(np.ldexp(1.0, j_min - 1) * lam) ** 2 - profile(np.ldexp(1.0, j_max) * lam) ** 2
