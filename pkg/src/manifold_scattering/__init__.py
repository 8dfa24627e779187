"""Geometric wavelet and nonwindowed scattering transforms on compact manifolds."""
from .spectra import (
    QuadratureNodes,
    Spectrum,
    build_circle_spectrum,
    build_pointcloud_spectrum,
    build_torus_spectrum,
    load_spectrum,
    save_spectrum,
)
from .transform import (
    Signal,
    SpectralFilter,
    analyze,
    convolve,
    g_function,
    kernel_matrix,
    lq_norm,
    synthesize,
    vector_norm_ratio,
)
from .filters import (
    LowPassProfile,
    WaveletBank,
    build_wavelet_bank,
    frame_defect,
    lowpass_filter,
    make_profile,
)
from .scattering import (
    MomentTable,
    moments,
    propagate,
    scattering_norm,
    windowed_scattering,
)

__version__ = "0.1.0"
