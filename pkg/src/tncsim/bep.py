"""Analytic bit-error-probability evaluators.

Four routes to the same quantity, each useful in a different regime:

* ``bep_conditional``     -- exact BEP for a known channel magnitude, from
                             the chi-squared law of the variance estimator.
* ``bep_rician_gl``       -- Rician-faded average via Gauss-Laguerre
                             quadrature of the conditional BEP.
* ``bep_rician_adaptive`` -- the same average via globally adaptive
                             quadrature with explicit error control; serves
                             as the independent oracle for the GL route.
* ``bep_asymptotic``      -- the large-delta error floor, a function of
                             (alpha, N) only.
* ``bep_approx_qfunction``-- the classical Gaussian-approximation baseline.

Precision note: exact conditional values are formed as
``(1 - F(z0) + F(z1)) / 2`` in double precision, so below roughly 1e-14 the
cancellation in ``1 - F`` dominates and returned digits are noise.  Values
are reported as computed, without flooring.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

from scipy.integrate import quad

from .quadrature import QuadratureRule, gauss_laguerre_rule
from .special import bessel_i0_scaled, chi_squared_cdf, q_function
from .system import (
    Channel,
    ConstantChannel,
    RicianChannel,
    SystemParams,
    ThresholdRule,
    received_variances,
    resolve_threshold,
)

log = logging.getLogger(__name__)

METHOD_EXACT = "exact"
METHOD_GL = "gl"
METHOD_ADAPTIVE = "adaptive"
METHOD_APPROX = "approx"
METHOD_ASYMPTOTIC = "asymptotic"
METHOD_MC = "mc"

_CLAMP_SLACK = 1e-12
_DEFAULT_QUAD_ORDER = 30


class IntegrationError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the best available estimate and the integrator's error bound.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class ProbabilityBoundsError(RuntimeError):
    """A computed probability fell outside [0, 1] by more than roundoff."""


@dataclass(frozen=True)
class BepEstimate:
    """A BEP value tagged with how it was obtained."""

    value: float
    method: str
    rule: Optional[ThresholdRule] = None
    params: Optional[SystemParams] = None
    channel: Optional[Channel] = None
    quad_order: Optional[int] = None


def _clamp_unit(value: float, context: str) -> float:
    """Clamp roundoff-level excursions outside [0, 1]; flag anything larger."""
    if 0.0 <= value <= 1.0:
        return value
    if -_CLAMP_SLACK <= value < 0.0:
        log.debug("clamping %s result %.3e to 0", context, value)
        return 0.0
    if 1.0 < value <= 1.0 + _CLAMP_SLACK:
        log.debug("clamping %s result to 1 (excess %.3e)", context, value - 1.0)
        return 1.0
    raise ProbabilityBoundsError(
        f"{context} produced {value!r}, outside [0, 1] beyond roundoff slack"
    )


def _conditional_value(params: SystemParams, h_mag: float, rule: ThresholdRule) -> float:
    """Exact conditional BEP: (1 - F(2 N gamma / s0) + F(2 N gamma / s1)) / 2."""
    if h_mag == 0.0:
        return 0.5
    gamma = resolve_threshold(rule, params, h_mag)
    s0, s1 = received_variances(params, h_mag)
    n = params.n_samples
    dof = 2 * n
    return 0.5 * (1.0 - chi_squared_cdf(2.0 * n * gamma / s0, dof)
                  + chi_squared_cdf(2.0 * n * gamma / s1, dof))


def bep_conditional(params: SystemParams, h_mag: float, rule: ThresholdRule) -> BepEstimate:
    """Exact BEP for a known channel magnitude.

    |h| = 0 maps to 1/2 by convention: the hypotheses coincide and every
    decision rule errs on half the bits.
    """
    if h_mag < 0.0:
        raise ValueError(f"h_mag must be nonnegative, got {h_mag}")
    value = _clamp_unit(_conditional_value(params, h_mag, rule), "conditional BEP")
    return BepEstimate(value=value, method=METHOD_EXACT, rule=rule, params=params,
                       channel=ConstantChannel(h_mag))


def _rician_gl_value(params: SystemParams, k_factor: float, rule: ThresholdRule,
                     quad_rule: QuadratureRule) -> float:
    """Gauss-Laguerre sum for the Rician-averaged BEP.

    After substituting x = r^2 (K + 1), the average becomes
    e^{-K} * integral_0^inf e^{-x} I0(2 sqrt(K x)) * P_e(sqrt(x/(K+1))) dx.
    Each term folds the weight and the exponential Bessel growth together in
    log space: w_j * e^{-K} I0(z_j) = exp(ln w_j + z_j - K) * i0e(z_j) with
    z_j = 2 sqrt(K x_j), which cannot overflow since z - K <= x.
    """
    k1 = k_factor + 1.0
    total = 0.0
    for x_j, log_w in zip(quad_rule.nodes, quad_rule.log_weights):
        z = 2.0 * math.sqrt(k_factor * x_j)
        factor = math.exp(log_w + z - k_factor) * bessel_i0_scaled(z)
        if factor == 0.0:
            continue
        r_j = math.sqrt(x_j / k1)
        total += factor * 2.0 * _conditional_value(params, r_j, rule)
    return 0.5 * total


def bep_rician_gl(params: SystemParams, k_factor: float, rule: ThresholdRule,
                  quad_order: int = _DEFAULT_QUAD_ORDER) -> BepEstimate:
    """Rician-averaged BEP by Gauss-Laguerre quadrature of the given order.

    The threshold is re-resolved at every quadrature node (per-fade perfect
    CSI).  Low orders under-resolve the deep-fade region once the detection
    transition moves below the smallest node (large delta or large N); use
    ``bep_rician_adaptive`` as the reference in those regimes.
    """
    if k_factor < 0.0:
        raise ValueError(f"k_factor must be nonnegative, got {k_factor}")
    rule_q = gauss_laguerre_rule(quad_order)
    value = _clamp_unit(_rician_gl_value(params, k_factor, rule, rule_q),
                        "Gauss-Laguerre BEP")
    return BepEstimate(value=value, method=METHOD_GL, rule=rule, params=params,
                       channel=RicianChannel(k_factor), quad_order=quad_order)


def _rician_envelope_pdf(r: float, channel: RicianChannel) -> float:
    """Rician envelope density, written in overflow-safe scaled form."""
    lam = channel.los_amplitude
    s2 = channel.scatter_var
    z = lam * r / s2
    return r / s2 * bessel_i0_scaled(z) * math.exp(-((r - lam) ** 2) / (2.0 * s2))


def _rician_breakpoints(delta: float, channel: RicianChannel, r_max: float) -> list[float]:
    """Interval breakpoints the integrator must not skip: the detection
    transition radii r = sqrt(c / delta) (the deep-fade knee, which turns
    into an arbitrarily narrow spike as delta grows) and the LoS ridge."""
    pts = {math.sqrt(c / delta) for c in (1e-4, 1e-2, 1.0, 1e2)}
    pts.add(channel.los_amplitude)
    return sorted(p for p in pts if 0.0 < p < r_max)


def _integrate_rician(integrand, delta: float, channel: RicianChannel,
                      rel_tol: float, context: str) -> float:
    """Adaptive quadrature over the envelope distribution with tail control.

    The tail is truncated where the envelope CCDF bound
    P(R > r) <= exp(-(r - lam)^2 / (2 s2)) drops below rel_tol / 10.
    """
    lam = channel.los_amplitude
    s = math.sqrt(channel.scatter_var)
    r_max = lam + s * math.sqrt(2.0 * math.log(10.0 / rel_tol))
    pts = _rician_breakpoints(delta, channel, r_max)
    out = quad(integrand, 0.0, r_max, points=pts,
               epsabs=1e-300, epsrel=rel_tol, limit=800, full_output=1)
    result, abserr = out[0], out[1]
    if len(out) > 3:
        log.debug("%s: integrator note: %s", context, out[3])
    if not math.isfinite(result) or abserr > max(10.0 * rel_tol * abs(result), 1e-290):
        raise IntegrationError(
            f"{context}: adaptive quadrature error bound {abserr:.3e} exceeds "
            f"tolerance for estimate {result:.6e}",
            estimate=result, error_bound=abserr,
        )
    return result


def bep_rician_adaptive(params: SystemParams, k_factor: float, rule: ThresholdRule,
                        rel_tol: float = 1e-9) -> BepEstimate:
    """Rician-averaged BEP by direct adaptive integration over the envelope.

    Independent of the Gauss-Laguerre machinery (globally adaptive
    Gauss-Kronrod panels with explicit error bounds), so the two routes
    cross-check each other.  rel_tol must lie in [1e-12, 1e-4].
    """
    if k_factor < 0.0:
        raise ValueError(f"k_factor must be nonnegative, got {k_factor}")
    if not 1e-12 <= rel_tol <= 1e-4:
        raise ValueError(f"rel_tol must be in [1e-12, 1e-4], got {rel_tol}")
    channel = RicianChannel(k_factor)

    def integrand(r: float) -> float:
        return _conditional_value(params, r, rule) * _rician_envelope_pdf(r, channel)

    value = _integrate_rician(integrand, params.delta, channel, rel_tol,
                              "Rician BEP")
    return BepEstimate(value=_clamp_unit(value, "adaptive Rician BEP"),
                       method=METHOD_ADAPTIVE, rule=rule, params=params,
                       channel=channel)


def bep_asymptotic(alpha: float, n_samples: int) -> BepEstimate:
    """Large-delta error floor; depends on (alpha, N) only, by construction.

    (1 - F(2 alpha N ln(alpha) / (alpha - 1)) + F(2 N ln(alpha) / (alpha - 1))) / 2
    at 2N degrees of freedom.  No channel or noise argument exists to pass.
    """
    if not alpha > 1.0:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    if not (isinstance(n_samples, int) and n_samples >= 1):
        raise ValueError(f"n_samples must be a positive integer, got {n_samples!r}")
    c = 2.0 * n_samples * math.log(alpha) / (alpha - 1.0)
    dof = 2 * n_samples
    value = 0.5 * (1.0 - chi_squared_cdf(alpha * c, dof) + chi_squared_cdf(c, dof))
    return BepEstimate(value=_clamp_unit(value, "asymptotic BEP"),
                       method=METHOD_ASYMPTOTIC)


def _approx_argument(params: SystemParams, g: float) -> float:
    """Q-function argument sqrt(N) g delta (alpha-1) / (2 + g delta (alpha+1))
    for squared channel magnitude g; equals the equal-tail Gaussian error
    exponent at the harmonic-mean threshold."""
    return (math.sqrt(params.n_samples) * g * params.delta * (params.alpha - 1.0)
            / (2.0 + g * params.delta * (params.alpha + 1.0)))


def bep_approx_qfunction(params: SystemParams, channel: Channel,
                         rel_tol: float = 1e-9) -> BepEstimate:
    """Gaussian-approximation BEP baseline (accurate only for large N).

    Constant channel: Q of the equal-tail argument.  Rician: the same
    integrand averaged over the envelope with the adaptive integrator.
    """
    if isinstance(channel, ConstantChannel):
        value = q_function(_approx_argument(params, channel.h_mag ** 2))
        return BepEstimate(value=_clamp_unit(value, "approximate BEP"),
                           method=METHOD_APPROX, params=params, channel=channel)
    if not 1e-12 <= rel_tol <= 1e-4:
        raise ValueError(f"rel_tol must be in [1e-12, 1e-4], got {rel_tol}")

    def integrand(r: float) -> float:
        return (q_function(_approx_argument(params, r * r))
                * _rician_envelope_pdf(r, channel))

    value = _integrate_rician(integrand, params.delta, channel, rel_tol,
                              "approximate Rician BEP")
    return BepEstimate(value=_clamp_unit(value, "approximate Rician BEP"),
                       method=METHOD_APPROX, params=params, channel=channel)
