"""Parameter sweeps over the BEP evaluators, with a fixed CSV schema.

A sweep varies exactly one of {gamma, delta, alpha, K, N} while holding the
rest of the operating point fixed, and evaluates every requested
(method, rule) combination at every point.  Rows are emitted in
deterministic order (sweep value outer, then method, then rule as given);
evaluator failures land in the row's ``error`` column instead of aborting
the sweep.  Floats are serialized with 17 significant digits so the CSV
round-trips exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, TextIO

from . import bep as _bep
from .montecarlo import McResult, TrialConfig, estimate_bep
from .system import (
    Channel,
    DegenerateChannelError,
    FixedThreshold,
    OptimalMl,
    RicianChannel,
    SuboptimalGaussian,
    SystemParams,
    ThresholdRule,
)

SWEEP_VARIABLES = ("gamma", "delta", "alpha", "K", "N")
METHODS = ("exact", "gl", "adaptive", "approx", "asymptotic", "mc")

CSV_COLUMNS = ("sweep_var", "sweep_value", "method", "rule", "alpha", "delta",
               "K_factor", "n_samples", "N_a", "h_mag", "sigma_w2", "bep",
               "ci_low", "ci_high", "seed", "error")


class SweepValidationError(ValueError):
    """Invalid sweep specification; names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def values_from_range(start: float, stop: float, points: int,
                      scale: str = "linear") -> tuple[float, ...]:
    """Materialize a sweep grid from its range description."""
    if scale not in ("linear", "log"):
        raise SweepValidationError("scale", f"must be 'linear' or 'log', got {scale!r}")
    if points < 2:
        raise SweepValidationError("points", f"must be at least 2, got {points}")
    if not start < stop:
        raise SweepValidationError("from", f"must be below 'to', got {start} >= {stop}")
    if scale == "log":
        if start <= 0.0:
            raise SweepValidationError("from", "log scale requires a positive start")
        la, lb = math.log(start), math.log(stop)
        inner = (math.exp(la + (lb - la) * i / (points - 1)) for i in range(1, points - 1))
        return (start, *inner, stop)
    inner = (start + (stop - start) * i / (points - 1) for i in range(1, points - 1))
    return (start, *inner, stop)


def parse_rule(label: str) -> ThresholdRule:
    """'opt' | 'subopt' | 'fixed:<gamma>' to a threshold rule."""
    if label == "opt":
        return OptimalMl()
    if label == "subopt":
        return SuboptimalGaussian()
    if label.startswith("fixed:"):
        try:
            gamma = float(label.split(":", 1)[1])
        except ValueError:
            raise SweepValidationError("rules", f"bad fixed threshold in {label!r}")
        if not gamma > 0.0:
            raise SweepValidationError("rules", f"fixed threshold must be positive, got {gamma}")
        return FixedThreshold(gamma)
    raise SweepValidationError("rules", f"unknown rule {label!r}")


def rule_label(rule: ThresholdRule) -> str:
    if isinstance(rule, OptimalMl):
        return "opt"
    if isinstance(rule, SuboptimalGaussian):
        return "subopt"
    return f"fixed:{rule.gamma:.17g}"


@dataclass(frozen=True)
class SweepSpec:
    """One resolved sweep: the axis, its grid, and the fixed configuration."""

    variable: str
    values: tuple[float, ...]
    params: SystemParams
    channel: Channel
    methods: tuple[str, ...]
    rules: tuple[ThresholdRule, ...] = ()
    quad_order: int = 30
    rel_tol: float = 1e-9
    mc: Optional[TrialConfig] = None


@dataclass(frozen=True)
class SweepRow:
    sweep_var: str
    sweep_value: float
    method: str
    rule: str
    alpha: float
    delta: float
    k_factor: Optional[float]
    n_samples: int
    quad_order: Optional[int]
    h_mag: Optional[float]
    sigma_w2: float
    bep: Optional[float]
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    seed: Optional[int] = None
    error: str = ""


def _validate(spec: SweepSpec) -> None:
    if spec.variable not in SWEEP_VARIABLES:
        raise SweepValidationError("variable", f"must be one of {SWEEP_VARIABLES}")
    if not spec.values:
        raise SweepValidationError("values", "sweep grid is empty")
    if not spec.methods:
        raise SweepValidationError("methods", "at least one method is required")
    for m in spec.methods:
        if m not in METHODS:
            raise SweepValidationError("methods", f"unknown method {m!r}")
    if spec.variable == "gamma":
        if spec.rules:
            raise SweepValidationError(
                "rules", "not applicable when sweeping gamma (each point is its "
                         "own fixed threshold)")
    elif not spec.rules:
        raise SweepValidationError("rules", "at least one rule is required")
    rician = isinstance(spec.channel, RicianChannel)
    if "exact" in spec.methods and rician:
        raise SweepValidationError("methods", "exact requires a constant channel")
    for m in ("gl", "adaptive"):
        if m in spec.methods and not rician:
            raise SweepValidationError("methods", f"{m} requires a Rician channel")
    if spec.variable == "K" and not rician:
        raise SweepValidationError("variable", "K sweep requires a Rician channel")
    if "mc" in spec.methods and spec.mc is None:
        raise SweepValidationError("mc", "mc method requested but no trial config given")
    for v in spec.values:
        if spec.variable == "gamma" and not v > 0.0:
            raise SweepValidationError("values", f"gamma values must be positive, got {v}")
        if spec.variable == "delta" and not v > 0.0:
            raise SweepValidationError("values", f"delta values must be positive, got {v}")
        if spec.variable == "alpha" and not v > 1.0:
            raise SweepValidationError("values", f"alpha values must exceed 1, got {v}")
        if spec.variable == "K" and v < 0.0:
            raise SweepValidationError("values", f"K values must be nonnegative, got {v}")
        if spec.variable == "N" and (v != int(v) or v < 1):
            raise SweepValidationError("values", f"N values must be positive integers, got {v}")
    if not 1 <= spec.quad_order <= 200:
        raise SweepValidationError("quad_order", f"must be in [1, 200], got {spec.quad_order}")


def _config_at(spec: SweepSpec, value: float) -> tuple[SystemParams, Channel]:
    params, channel = spec.params, spec.channel
    if spec.variable == "delta":
        params = replace(params, delta=value)
    elif spec.variable == "alpha":
        params = replace(params, alpha=value)
    elif spec.variable == "N":
        params = replace(params, n_samples=int(value))
    elif spec.variable == "K":
        channel = RicianChannel(value)
    return params, channel


def _evaluate(method: str, params: SystemParams, channel: Channel,
              rule: ThresholdRule, spec: SweepSpec):
    if method == "exact":
        return _bep.bep_conditional(params, channel.h_mag, rule).value, None
    if method == "gl":
        return _bep.bep_rician_gl(params, channel.k_factor, rule,
                                  spec.quad_order).value, None
    if method == "adaptive":
        return _bep.bep_rician_adaptive(params, channel.k_factor, rule,
                                        spec.rel_tol).value, None
    if method == "approx":
        return _bep.bep_approx_qfunction(params, channel, spec.rel_tol).value, None
    if method == "asymptotic":
        return _bep.bep_asymptotic(params.alpha, params.n_samples).value, None
    if method == "mc":
        result = estimate_bep(params, channel, rule, spec.mc)
        return result.bep_hat, result
    raise SweepValidationError("methods", f"unknown method {method!r}")


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate the sweep and return its rows in deterministic order."""
    _validate(spec)
    rows: list[SweepRow] = []
    for value in spec.values:
        params, channel = _config_at(spec, value)
        rules = (FixedThreshold(value),) if spec.variable == "gamma" else spec.rules
        rician = isinstance(channel, RicianChannel)
        for method in spec.methods:
            for rule in rules:
                bep_value: Optional[float] = None
                mc_result: Optional[McResult] = None
                error = ""
                try:
                    bep_value, mc_result = _evaluate(method, params, channel, rule, spec)
                except (DegenerateChannelError, _bep.IntegrationError,
                        _bep.ProbabilityBoundsError, ValueError, RuntimeError) as exc:
                    error = str(exc)
                rows.append(SweepRow(
                    sweep_var=spec.variable,
                    sweep_value=value,
                    method=method,
                    rule=rule_label(rule),
                    alpha=params.alpha,
                    delta=params.delta,
                    k_factor=channel.k_factor if rician else None,
                    n_samples=params.n_samples,
                    quad_order=spec.quad_order if method == "gl" else None,
                    h_mag=None if rician else channel.h_mag,
                    sigma_w2=params.sigma_w2,
                    bep=bep_value,
                    ci_low=mc_result.ci_low if mc_result else None,
                    ci_high=mc_result.ci_high if mc_result else None,
                    seed=mc_result.seed if mc_result else None,
                    error=error,
                ))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{value:.17g}"


def write_csv(rows: Sequence[SweepRow], stream: TextIO) -> None:
    """Write rows in the fixed column order; diagnostics never end up here."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([
            r.sweep_var, _fmt(r.sweep_value), r.method, r.rule, _fmt(r.alpha),
            _fmt(r.delta), _fmt(r.k_factor), _fmt(r.n_samples), _fmt(r.quad_order),
            _fmt(r.h_mag), _fmt(r.sigma_w2), _fmt(r.bep), _fmt(r.ci_low),
            _fmt(r.ci_high), _fmt(r.seed), r.error,
        ])


def load_config_file(path: str) -> dict[str, str]:
    """Parse a plain `key = value` experiment file ('#' starts a comment)."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SweepValidationError(
                    "config", f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise SweepValidationError("config", f"{path}:{lineno}: empty key")
            out[key] = value
    return out
