"""Random-coding exponents for finite-alphabet sources and channels.

Closed-form encoding success/failure, channel error/correct-decoding,
erasure/list margin and optimum-tradeoff exponents, validated against
brute-force variational oracles and Monte-Carlo simulation of the
underlying random-codebook experiments.
"""

__version__ = "0.1.0"

from .errors import (
    CodebookTooLarge,
    DimensionMismatch,
    EmptySupport,
    InsufficientData,
    ModelSpecError,
    NegativeEntry,
    NonStochastic,
    RcexpError,
    ZeroChannelEntry,
)
from .probability import (
    Channel,
    ConditionalKernel,
    Distribution,
    DistortionModel,
    JointDistribution,
    average_distortion,
    joint_from_input_and_channel,
    kl_divergence,
    mutual_information,
    simplex_grid,
    validate,
)
from .rates import (
    RateResult,
    channel_distortion,
    coupled_rate_function,
    distortion_bounds,
    finiteness_boundary,
    max_rate_over_sources,
    min_distortion_for_codebook,
    min_rate_boundary,
    rate_function,
)
from .exponents import (
    KINDS,
    ExponentResult,
    capacity,
    correct_envelope,
    correct_exponent,
    failure_envelope,
    forney_bound_exponent,
    forney_exponent,
    gallager_e0,
    gallager_error_exponent,
    margin_error_exponent,
    maximize_over_codebooks,
    success_exponent,
)
from .oracle import (
    GridSpec,
    channel_exponent_brute,
    failure_exponent_brute,
    forney_components_brute,
    rate_function_brute,
    success_exponent_brute,
)
from .montecarlo import (
    SimConfig,
    SimResult,
    estimate_exponent,
    simulate_channel_margin,
    simulate_forney,
    simulate_source,
)
