"""k-directional short-time Fourier analysis, synthesis and directional
singularity detection for sampled n-dimensional signals."""

from .grids import (
    Grid,
    Signal,
    Spectrum,
    dft,
    dft_oracle,
    idft,
    inner_product,
    inner_product_spectrum,
)
from .windows import (
    PairingCert,
    Window,
    WindowKind,
    gaussian_window,
    gevrey_bump,
    gs_seminorm_probe,
    pairing_check,
)
from .direction import DirectionFrame, build_frame, frequency_map, identity_frame, pullback
from .transform import DstftField, default_y_grid, dstft_direct, dstft_fast, partial_stft
from .synthesis import dso, dso_direct, orthogonality_check, reconstruct, window_change
from .wavefront import (
    BallSpec,
    ConeSpec,
    DecayFit,
    WavefrontReport,
    cone_dictionary_2d,
    decay_fit,
    global_regularity_check,
    partial_wf_test,
    regular_point_test,
    wavefront_scan,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
