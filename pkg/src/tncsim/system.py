"""Operating point, channel models, and detection thresholds for a binary
variance-modulated thermal-noise link.

The transmitter switches between two resistor-defined noise variances; the
receiver estimates the sample variance of N complex samples and compares it
to a threshold.  Conventions:

* ``alpha``   -- bit-1 to bit-0 variance ratio (= resistor ratio), > 1.
* ``delta``   -- transmit-side ratio of information-noise variance to
                 receiver-noise variance, so the received per-bit variances
                 are sigma_w2 * (|h|^2 * delta + 1) and
                 sigma_w2 * (|h|^2 * alpha * delta + 1).
* ``h``       -- complex channel gain; only |h| matters for detection.

Note on ``delta``: some treatments define it as the *received* bit-0 to
receiver noise ratio instead.  Everything here uses the transmit-side
convention above, which is the one all threshold and error-rate formulas in
this package are written in.

All types are immutable and all operations pure; unrestricted concurrent
use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

BOLTZMANN = 1.380649e-23  # J/K, exact SI value


class DegenerateChannelError(ValueError):
    """Raised when |h| = 0 makes the two bit hypotheses identical."""


@dataclass(frozen=True)
class SystemParams:
    """Link operating point: variance ratio, SNR-like ratio, receiver noise
    variance, and samples per symbol."""

    alpha: float
    delta: float
    n_samples: int
    sigma_w2: float = 1.0

    def __post_init__(self):
        if not self.alpha > 1.0:
            raise ValueError(f"alpha must exceed 1 (no variance separation), got {self.alpha}")
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not self.sigma_w2 > 0.0:
            raise ValueError(f"sigma_w2 must be positive, got {self.sigma_w2}")
        if not (isinstance(self.n_samples, int) and self.n_samples >= 1):
            raise ValueError(f"n_samples must be a positive integer, got {self.n_samples!r}")


@dataclass(frozen=True)
class PhysicalNoiseSource:
    """Resistor noise source: R in ohms, T in kelvin, B in hertz."""

    resistance: float
    temperature: float
    bandwidth: float

    def __post_init__(self):
        for name in ("resistance", "temperature", "bandwidth"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class ConstantChannel:
    """Known fixed channel gain magnitude |h| (perfect CSI)."""

    h_mag: float = 1.0

    def __post_init__(self):
        if self.h_mag < 0.0:
            raise ValueError(f"h_mag must be nonnegative, got {self.h_mag}")


@dataclass(frozen=True)
class RicianChannel:
    """Rician-fading envelope with K = LoS power over total scattered power.

    Normalized to unit mean-square gain: los_amplitude^2 + 2*scatter_var = 1.
    K = 0 is Rayleigh fading; K -> inf approaches a constant unit gain.
    """

    k_factor: float

    def __post_init__(self):
        if self.k_factor < 0.0:
            raise ValueError(f"k_factor must be nonnegative, got {self.k_factor}")

    @property
    def los_amplitude(self) -> float:
        """Line-of-sight amplitude, sqrt(K / (K + 1))."""
        return math.sqrt(self.k_factor / (self.k_factor + 1.0))

    @property
    def scatter_var(self) -> float:
        """Scattered power per quadrature component, 1 / (2 (K + 1))."""
        return 0.5 / (self.k_factor + 1.0)


Channel = Union[ConstantChannel, RicianChannel]


@dataclass(frozen=True)
class OptimalMl:
    """Exact maximum-likelihood threshold for the chi-squared statistic."""


@dataclass(frozen=True)
class SuboptimalGaussian:
    """Equal-tail threshold under the Gaussian approximation of the variance
    estimator (harmonic mean of the two received variances)."""


@dataclass(frozen=True)
class FixedThreshold:
    """User-supplied threshold in variance units."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ValueError(f"fixed threshold must be positive, got {self.gamma}")


ThresholdRule = Union[OptimalMl, SuboptimalGaussian, FixedThreshold]


def thermal_variance(src: PhysicalNoiseSource) -> float:
    """Noise variance 4 R k T B of a resistor source."""
    return 4.0 * src.resistance * BOLTZMANN * src.temperature * src.bandwidth


def received_variances(params: SystemParams, h_mag: float) -> tuple[float, float]:
    """Received sample variances (bit 0, bit 1) for channel magnitude |h|."""
    if h_mag < 0.0:
        raise ValueError(f"h_mag must be nonnegative, got {h_mag}")
    g = h_mag * h_mag
    s0 = params.sigma_w2 * (g * params.delta + 1.0)
    s1 = params.sigma_w2 * (g * params.alpha * params.delta + 1.0)
    return s0, s1


def optimal_threshold(params: SystemParams, h_mag: float) -> float:
    """Maximum-likelihood decision threshold on the sample variance.

    gamma = s0 * s1 / (s1 - s0) * ln(s1 / s0), which satisfies the
    equal-likelihood identity ln(s1/s0) = gamma * (s1 - s0) / (s0 * s1)
    and always lies strictly between s0 and s1.
    """
    if h_mag <= 0.0:
        raise DegenerateChannelError(
            "optimal threshold undefined for |h| = 0: hypotheses are identical"
        )
    s0, s1 = received_variances(params, h_mag)
    # s1 - s0 as an exact product and the log via log1p: both stay fully
    # conditioned when the variances nearly coincide (tiny |h|^2 delta)
    g = h_mag * h_mag
    diff = params.sigma_w2 * g * params.delta * (params.alpha - 1.0)
    log_ratio = math.log1p(g * params.alpha * params.delta) - math.log1p(g * params.delta)
    return s0 * s1 / diff * log_ratio


def suboptimal_threshold(params: SystemParams, h_mag: float) -> float:
    """Gaussian-approximation threshold: harmonic mean 2 s0 s1 / (s0 + s1).

    Equalizes the two Gaussian tail errors when the variance estimator is
    approximated as Normal(s_i, s_i^2 / N); never exceeds the ML threshold.
    """
    if h_mag <= 0.0:
        raise DegenerateChannelError(
            "suboptimal threshold undefined for |h| = 0: hypotheses are identical"
        )
    s0, s1 = received_variances(params, h_mag)
    return 2.0 * s0 * s1 / (s0 + s1)


def resolve_threshold(rule: ThresholdRule, params: SystemParams, h_mag: float) -> float:
    """Dispatch a threshold rule to its concrete threshold value."""
    if isinstance(rule, FixedThreshold):
        return rule.gamma
    if isinstance(rule, OptimalMl):
        return optimal_threshold(params, h_mag)
    if isinstance(rule, SuboptimalGaussian):
        return suboptimal_threshold(params, h_mag)
    raise TypeError(f"unknown threshold rule: {rule!r}")
