"""Bit-level Monte Carlo simulation of the variance-detection link.

Randomness comes from numpy's counter-based Philox generator.  Independent
streams are derived deterministically from (master seed, stream index) via
SeedSequence spawn keys, so a run is bit-reproducible for a fixed seed and
declared stream count, and streams never need coordination.  Gaussians use
numpy's ziggurat (Generator.standard_normal), whose stream is stable across
numpy releases.

Two sampling paths produce identically distributed variance estimates:

* ``physical``    -- draw the N complex noise samples, apply the channel,
                     average |x|^2.
* ``statistical`` -- draw the chi-squared(2N) summary variable directly.

The statistical path is the default (orders of magnitude faster); the
physical path exists to validate it end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .system import (
    Channel,
    DegenerateChannelError,
    RicianChannel,
    SystemParams,
    ThresholdRule,
    FixedThreshold,
    OptimalMl,
    SuboptimalGaussian,
    resolve_threshold,
)

PATH_PHYSICAL = "physical"
PATH_STATISTICAL = "statistical"

_Z95 = 1.959963984540054  # two-sided 95% normal quantile
_CHUNK_BITS = 1 << 20


@dataclass(frozen=True)
class TrialConfig:
    """How many bits to simulate and how."""

    n_bits: int
    seed: int
    max_errors: Optional[int] = None
    path: str = PATH_STATISTICAL
    n_streams: int = 1

    def __post_init__(self):
        if not (isinstance(self.n_bits, int) and self.n_bits >= 1):
            raise ValueError(f"n_bits must be a positive integer, got {self.n_bits!r}")
        if self.max_errors is not None and self.max_errors < 10:
            raise ValueError(f"max_errors must be at least 10, got {self.max_errors}")
        if self.path not in (PATH_PHYSICAL, PATH_STATISTICAL):
            raise ValueError(f"path must be 'physical' or 'statistical', got {self.path!r}")
        if not (isinstance(self.n_streams, int) and self.n_streams >= 1):
            raise ValueError(f"n_streams must be a positive integer, got {self.n_streams!r}")


@dataclass(frozen=True)
class McResult:
    """Error count, point estimate, and 95% Wilson interval."""

    errors: int
    trials: int
    bep_hat: float
    ci_low: float
    ci_high: float
    seed: int


def wilson_interval(errors: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Stays inside [0, 1] and behaves sensibly at zero or few errors, unlike
    the Wald interval.
    """
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= errors <= trials:
        raise ValueError(f"errors must be in [0, trials], got {errors}/{trials}")
    p = errors / trials
    z2n = z * z / trials
    denom = 1.0 + z2n
    center = (p + 0.5 * z2n) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + 0.25 * z2n / trials) / denom
    # the boundary roots are exact; don't let roundoff pull them inward
    low = 0.0 if errors == 0 else max(0.0, center - half)
    high = 1.0 if errors == trials else min(1.0, center + half)
    return low, high


def clopper_pearson_interval(errors: int, trials: int,
                             confidence: float = 0.95) -> tuple[float, float]:
    """Exact binomial interval; preferable when errors < ~30."""
    from scipy.stats import beta

    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= errors <= trials:
        raise ValueError(f"errors must be in [0, trials], got {errors}/{trials}")
    tail = 0.5 * (1.0 - confidence)
    low = 0.0 if errors == 0 else float(beta.ppf(tail, errors, trials - errors + 1))
    high = 1.0 if errors == trials else float(beta.ppf(1.0 - tail, errors + 1, trials - errors))
    return low, high


def _stream_rngs(seed: int, n_streams: int) -> list[np.random.Generator]:
    root = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(child)) for child in root.spawn(n_streams)]


def draw_rician_gain(k_factor: float, rng: np.random.Generator) -> complex:
    """One complex Rician channel gain: LoS amplitude plus circular scatter.

    |h|^2 has unit expectation for every K; K=0 reduces to Rayleigh fading.
    """
    if k_factor < 0.0:
        raise ValueError(f"k_factor must be nonnegative, got {k_factor}")
    ch = RicianChannel(k_factor)
    s = math.sqrt(ch.scatter_var)
    re = ch.los_amplitude + s * rng.standard_normal()
    im = s * rng.standard_normal()
    return complex(re, im)


def _batch_gains_squared(k_factor: float, count: int,
                         rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """(complex gains, squared magnitudes) for a block of symbols."""
    ch = RicianChannel(k_factor)
    s = math.sqrt(ch.scatter_var)
    re = ch.los_amplitude + s * rng.standard_normal(count)
    im = s * rng.standard_normal(count)
    return re + 1j * im, re * re + im * im


def _batch_variances(params: SystemParams, h: np.ndarray, g: np.ndarray,
                     bits: np.ndarray, path: str, rng: np.random.Generator) -> np.ndarray:
    """Sample variance estimates for a block of symbols.

    ``h`` are complex gains (used by the physical path), ``g`` their squared
    magnitudes.  Statistical path: sigma_x^2 * chi2(2N) / (2N).  Physical
    path: average |h s + w|^2 over N complex samples.  Identical laws.
    """
    n = params.n_samples
    tx_var = np.where(bits, params.alpha * params.delta, params.delta) * params.sigma_w2
    if path == PATH_STATISTICAL:
        rx_var = g * tx_var + params.sigma_w2
        return rx_var * rng.chisquare(2 * n, bits.shape[0]) / (2.0 * n)
    m = bits.shape[0]
    half_tx = np.sqrt(tx_var / 2.0)[:, None]
    s = half_tx * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
    half_w = math.sqrt(params.sigma_w2 / 2.0)
    w = half_w * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
    x = h[:, None] * s + w
    return np.mean(x.real ** 2 + x.imag ** 2, axis=1)


def simulate_symbol_variance(params: SystemParams, h: complex, bit: int, path: str,
                             rng: np.random.Generator) -> float:
    """One draw of the receiver's variance estimate for a given channel/bit."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    if path not in (PATH_PHYSICAL, PATH_STATISTICAL):
        raise ValueError(f"path must be 'physical' or 'statistical', got {path!r}")
    h_arr = np.asarray([complex(h)])
    g_arr = np.asarray([abs(complex(h)) ** 2])
    bits = np.asarray([bit], dtype=bool)
    return float(_batch_variances(params, h_arr, g_arr, bits, path, rng)[0])


def _thresholds(rule: ThresholdRule, params: SystemParams, g: np.ndarray) -> np.ndarray:
    """Vectorized per-symbol thresholds from squared channel magnitudes."""
    if isinstance(rule, FixedThreshold):
        return np.full(g.shape, rule.gamma)
    sw2 = params.sigma_w2
    a = sw2 * (g * params.delta + 1.0)
    b = sw2 * (g * params.alpha * params.delta + 1.0)
    if isinstance(rule, SuboptimalGaussian):
        return 2.0 * a * b / (a + b)
    if isinstance(rule, OptimalMl):
        # log1p keeps the ratio accurate through deep fades (g -> 0).
        return a * b / (b - a) * (np.log1p(g * params.alpha * params.delta)
                                  - np.log1p(g * params.delta))
    raise TypeError(f"unknown threshold rule: {rule!r}")


def estimate_bep(params: SystemParams, channel: Channel, rule: ThresholdRule,
                 cfg: TrialConfig) -> McResult:
    """Simulate cfg.n_bits equiprobable bits and count detection errors.

    Rician channels draw a fresh gain every symbol (block fading, one symbol
    per coherence interval) and re-resolve adaptive thresholds from the
    drawn magnitude (perfect CSI).  Stops early once ``max_errors`` is
    reached, reporting the bits actually simulated.  Work is split
    round-robin over ``n_streams`` independent Philox streams; the result is
    bit-identical for a fixed (seed, n_streams).
    """
    rngs = _stream_rngs(cfg.seed, cfg.n_streams)
    rician = isinstance(channel, RicianChannel)
    chunk = _CHUNK_BITS if cfg.path == PATH_STATISTICAL else max(
        1, (1 << 22) // (2 * params.n_samples))

    fixed_gamma = None
    fixed_h = None
    fixed_g = None
    if not rician:
        fixed_h = complex(channel.h_mag)
        fixed_g = channel.h_mag ** 2
        try:
            fixed_gamma = resolve_threshold(rule, params, channel.h_mag)
        except DegenerateChannelError:
            # |h| = 0: the hypotheses coincide, every threshold yields 1/2.
            fixed_gamma = params.sigma_w2

    errors = 0
    trials = 0
    remaining = cfg.n_bits
    chunk_idx = 0
    while remaining > 0:
        if cfg.max_errors is not None and errors >= cfg.max_errors:
            break
        m = min(chunk, remaining)
        rng = rngs[chunk_idx % cfg.n_streams]
        chunk_idx += 1

        bits = rng.integers(0, 2, m).astype(bool)
        if rician:
            h, g = _batch_gains_squared(channel.k_factor, m, rng)
            gamma = _thresholds(rule, params, g)
        else:
            h = np.full(m, fixed_h)
            g = np.full(m, fixed_g)
            gamma = np.full(m, fixed_gamma)
        est = _batch_variances(params, h, g, bits, cfg.path, rng)
        errors += int(np.count_nonzero((est > gamma) != bits))
        trials += m
        remaining -= m

    ci_low, ci_high = wilson_interval(errors, trials)
    return McResult(errors=errors, trials=trials, bep_hat=errors / trials,
                    ci_low=ci_low, ci_high=ci_high, seed=cfg.seed)
