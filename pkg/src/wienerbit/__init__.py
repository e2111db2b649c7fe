"""Tracking a Wiener process over a delay channel with one bit plus silence per sample."""
from .distgrid import (
    DiscretePdf,
    Grid,
    Region,
    RegionKind,
    convolve,
    cdf_inverse,
    gaussian_pdf,
    kl_divergence,
    make_grid,
    moments,
    shift_truncate_normalize,
)
from .errors import (
    ConfigurationError,
    DegenerateRegionError,
    GridOverflowError,
    InsufficientDataError,
    NonConvergenceError,
    NumericalError,
)
from .quantize import (
    LloydConfig,
    Quantizer,
    Symbol,
    expected_distortion,
    gaussian_fixed_point,
    lloyd_max,
    symbol_probabilities,
)
from .track import (
    Deterministic,
    GaussianStatic,
    LastBitAware,
    OptimumTracking,
    SimConfig,
    TraceStats,
    UniformRandom,
    derive_last_bit_tables,
    simulate,
    with_delay,
)

__version__ = "0.1.0"
