"""Bit-error analysis and simulation for binary variance-modulated
thermal-noise communication links under constant and Rician-fading channels.
"""

from .bep import (
    BepEstimate,
    IntegrationError,
    ProbabilityBoundsError,
    bep_approx_qfunction,
    bep_asymptotic,
    bep_conditional,
    bep_rician_adaptive,
    bep_rician_gl,
)
from .montecarlo import (
    McResult,
    TrialConfig,
    clopper_pearson_interval,
    draw_rician_gain,
    estimate_bep,
    simulate_symbol_variance,
    wilson_interval,
)
from .quadrature import QuadratureRule, gauss_laguerre_rule
from .special import (
    bessel_i0_scaled,
    chi_squared_cdf,
    q_function,
    regularized_lower_gamma,
)
from .sweep import SweepRow, SweepSpec, SweepValidationError, run_sweep, write_csv
from .system import (
    BOLTZMANN,
    Channel,
    ConstantChannel,
    DegenerateChannelError,
    FixedThreshold,
    OptimalMl,
    PhysicalNoiseSource,
    RicianChannel,
    SuboptimalGaussian,
    SystemParams,
    ThresholdRule,
    optimal_threshold,
    received_variances,
    resolve_threshold,
    suboptimal_threshold,
    thermal_variance,
)

__version__ = "0.1.0"

__all__ = [
    "BOLTZMANN",
    "BepEstimate",
    "Channel",
    "ConstantChannel",
    "DegenerateChannelError",
    "FixedThreshold",
    "IntegrationError",
    "McResult",
    "OptimalMl",
    "PhysicalNoiseSource",
    "ProbabilityBoundsError",
    "QuadratureRule",
    "RicianChannel",
    "SuboptimalGaussian",
    "SweepRow",
    "SweepSpec",
    "SweepValidationError",
    "SystemParams",
    "ThresholdRule",
    "TrialConfig",
    "bep_approx_qfunction",
    "bep_asymptotic",
    "bep_conditional",
    "bep_rician_adaptive",
    "bep_rician_gl",
    "bessel_i0_scaled",
    "chi_squared_cdf",
    "clopper_pearson_interval",
    "draw_rician_gain",
    "estimate_bep",
    "gauss_laguerre_rule",
    "optimal_threshold",
    "q_function",
    "received_variances",
    "regularized_lower_gamma",
    "resolve_threshold",
    "run_sweep",
    "simulate_symbol_variance",
    "suboptimal_threshold",
    "thermal_variance",
    "wilson_interval",
    "write_csv",
]
