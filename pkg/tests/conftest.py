import numpy as np
import pytest

from manifold_scattering.filters import build_wavelet_bank, make_profile
from manifold_scattering.spectra import build_circle_spectrum, build_torus_spectrum

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def circle():
    return build_circle_spectrum(65, 256)


@pytest.fixture(scope="session")
def torus():
    return build_torus_spectrum(81, 32)


@pytest.fixture(scope="session")
def expo():
    return make_profile("exponential", 1.0)


@pytest.fixture(scope="session")
def bank8(circle, expo):
    return build_wavelet_bank(expo, circle, -8, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance():
    """Record one result line per acceptance criterion."""
    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
