"""Command-line front end.

Subcommands mirror the natural workflow: ``threshold`` prints the detection
thresholds for an operating point, ``bep`` evaluates a single point with any
method, ``sweep`` generates CSV curve data (optionally with a rendered
figure), ``mc`` runs a standalone simulation, and ``selftest`` executes the
built-in verification suite.

Options may come from a ``key = value`` config file (--config); explicit
flags always win over file values.  Exit codes: 0 success, 1 validation
error, 2 selftest failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import bep as _bep
from .montecarlo import TrialConfig, estimate_bep
from .selftest import ALL_CHECKS, format_report, run_selftest
from .sweep import (
    SweepSpec,
    SweepValidationError,
    load_config_file,
    parse_rule,
    run_sweep,
    values_from_range,
    write_csv,
)
from .system import (
    ConstantChannel,
    DegenerateChannelError,
    RicianChannel,
    SystemParams,
    optimal_threshold,
    suboptimal_threshold,
)

log = logging.getLogger("tncsim")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise SweepValidationError("args", message)


def _add_common(p: argparse.ArgumentParser, mc: bool = False) -> None:
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--sigma-w2", dest="sigma_w2", type=float, default=None)
    p.add_argument("--n-samples", dest="n_samples", type=int, default=None)
    p.add_argument("--channel", choices=("constant", "rician"), default=None)
    p.add_argument("--h-mag", dest="h_mag", type=float, default=None)
    p.add_argument("--k-factor", dest="k_factor", type=float, default=None)
    p.add_argument("--rule", default=None, help="opt | subopt | fixed:<gamma>")
    p.add_argument("--quad-order", dest="quad_order", type=int, default=None)
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    if mc:
        p.add_argument("--bits", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--max-errors", dest="max_errors", type=int, default=None)
        p.add_argument("--mc-path", dest="mc_path", choices=("statistical", "physical"),
                       default=None)
        p.add_argument("--n-streams", dest="n_streams", type=int, default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="tncsim",
                     description="Bit-error analysis for variance-modulated "
                                 "thermal-noise links")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="diagnostic logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", parents=[], help="print detection thresholds")
    _add_common(p)

    p = sub.add_parser("bep", help="single-point BEP evaluation")
    _add_common(p, mc=True)
    p.add_argument("--method", choices=("exact", "gl", "adaptive", "approx",
                                        "asymptotic", "mc"), default=None)

    p = sub.add_parser("sweep", help="curve generation to CSV (and figure)")
    _add_common(p, mc=True)
    p.add_argument("--var", dest="variable",
                   choices=("gamma", "delta", "alpha", "K", "N"), default=None)
    p.add_argument("--from", dest="start", type=float, default=None)
    p.add_argument("--to", dest="stop", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--scale", choices=("linear", "log"), default=None)
    p.add_argument("--n-values", dest="n_values", default=None,
                   help="comma-separated integers (N sweeps only)")
    p.add_argument("--methods", default=None, help="comma-separated method list")
    p.add_argument("--rules", default=None, help="comma-separated rule list")
    p.add_argument("--out", default=None, help="CSV destination (default stdout)")
    p.add_argument("--plot", default=None, help="also render a figure to this file")

    p = sub.add_parser("mc", help="standalone Monte Carlo simulation")
    _add_common(p, mc=True)

    p = sub.add_parser("selftest", help="run the verification suite")
    p.add_argument("--checks", default=None,
                   help=f"comma-separated subset of: {', '.join(ALL_CHECKS)}")
    return parser


def _merged(args, key: str, default=None, cast=None):
    """flag > config file > default."""
    value = getattr(args, key, None)
    if value is None and getattr(args, "_config", None):
        raw = args._config.get(key)
        if raw is not None:
            value = cast(raw) if cast else raw
    return default if value is None else value


_CONFIG_KEYS = {
    "alpha", "delta", "sigma_w2", "n_samples", "channel", "h_mag", "k_factor",
    "rule", "quad_order", "rel_tol", "bits", "seed", "max_errors", "mc_path",
    "n_streams", "variable", "from", "to", "points", "scale", "n_values",
    "methods", "rules", "out", "plot", "method",
}


def _attach_config(args) -> None:
    path = getattr(args, "config", None)
    if not path:
        args._config = {}
        return
    cfg = load_config_file(path)
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise SweepValidationError("config", f"unknown keys: {', '.join(sorted(unknown))}")
    # 'from'/'to' are CLI spellings of the range bounds
    if "from" in cfg:
        cfg["start"] = cfg.pop("from")
    if "to" in cfg:
        cfg["stop"] = cfg.pop("to")
    args._config = cfg


def _params(args) -> SystemParams:
    return SystemParams(
        alpha=_merged(args, "alpha", 8.0, float),
        delta=_merged(args, "delta", 0.8, float),
        n_samples=_merged(args, "n_samples", 30, int),
        sigma_w2=_merged(args, "sigma_w2", 1.0, float),
    )


def _channel(args):
    kind = _merged(args, "channel", "constant")
    if kind == "constant":
        return ConstantChannel(_merged(args, "h_mag", 1.0, float))
    if kind == "rician":
        return RicianChannel(_merged(args, "k_factor", 3.0, float))
    raise SweepValidationError("channel", f"must be constant or rician, got {kind!r}")


def _trial_config(args) -> TrialConfig:
    return TrialConfig(
        n_bits=_merged(args, "bits", 1_000_000, int),
        seed=_merged(args, "seed", 1, int),
        max_errors=_merged(args, "max_errors", None, int),
        path=_merged(args, "mc_path", "statistical"),
        n_streams=_merged(args, "n_streams", 1, int),
    )


def _cmd_threshold(args) -> int:
    params = _params(args)
    h_mag = _merged(args, "h_mag", 1.0, float)
    print(f"gamma_opt = {optimal_threshold(params, h_mag):.17g}")
    print(f"gamma_subopt = {suboptimal_threshold(params, h_mag):.17g}")
    return 0


def _cmd_bep(args) -> int:
    method = _merged(args, "method")
    if method is None:
        raise SweepValidationError("method", "required for bep")
    params = _params(args)
    channel = _channel(args)
    rule = parse_rule(_merged(args, "rule", "opt"))
    if method == "exact":
        if not isinstance(channel, ConstantChannel):
            raise SweepValidationError("method", "exact requires a constant channel")
        est = _bep.bep_conditional(params, channel.h_mag, rule)
    elif method == "gl":
        if not isinstance(channel, RicianChannel):
            raise SweepValidationError("method", "gl requires a Rician channel")
        est = _bep.bep_rician_gl(params, channel.k_factor, rule,
                                 _merged(args, "quad_order", 30, int))
    elif method == "adaptive":
        if not isinstance(channel, RicianChannel):
            raise SweepValidationError("method", "adaptive requires a Rician channel")
        est = _bep.bep_rician_adaptive(params, channel.k_factor, rule,
                                       _merged(args, "rel_tol", 1e-9, float))
    elif method == "approx":
        est = _bep.bep_approx_qfunction(params, channel,
                                        _merged(args, "rel_tol", 1e-9, float))
    elif method == "asymptotic":
        est = _bep.bep_asymptotic(params.alpha, params.n_samples)
    elif method == "mc":
        result = estimate_bep(params, channel, rule, _trial_config(args))
        print(f"bep = {result.bep_hat:.17g}")
        print(f"errors = {result.errors}")
        print(f"trials = {result.trials}")
        print(f"ci_low = {result.ci_low:.17g}")
        print(f"ci_high = {result.ci_high:.17g}")
        print(f"seed = {result.seed}")
        return 0
    else:
        raise SweepValidationError("method", f"unknown method {method!r}")
    print(f"bep = {est.value:.17g}")
    print(f"method = {est.method}")
    return 0


def _cmd_sweep(args) -> int:
    variable = _merged(args, "variable")
    if variable is None:
        raise SweepValidationError("variable", "required for sweep (--var)")
    if variable == "N":
        raw = _merged(args, "n_values")
        if raw is None:
            raise SweepValidationError("n_values", "N sweeps need an explicit integer list")
        try:
            values = tuple(float(int(v)) for v in str(raw).split(","))
        except ValueError:
            raise SweepValidationError("n_values", f"bad integer list {raw!r}")
    else:
        start = _merged(args, "start", None, float)
        stop = _merged(args, "stop", None, float)
        points = _merged(args, "points", None, int)
        if start is None or stop is None or points is None:
            raise SweepValidationError("from", "range sweeps need --from, --to, --points")
        values = values_from_range(start, stop, points,
                                   _merged(args, "scale", "linear"))
    methods_raw = _merged(args, "methods")
    if methods_raw is None:
        raise SweepValidationError("methods", "required for sweep")
    methods = tuple(m.strip() for m in methods_raw.split(",") if m.strip())
    rules_raw = _merged(args, "rules")
    rules = () if rules_raw is None else tuple(
        parse_rule(r.strip()) for r in rules_raw.split(",") if r.strip())
    spec = SweepSpec(
        variable=variable,
        values=values,
        params=_params(args),
        channel=_channel(args),
        methods=methods,
        rules=rules,
        quad_order=_merged(args, "quad_order", 30, int),
        rel_tol=_merged(args, "rel_tol", 1e-9, float),
        mc=_trial_config(args) if "mc" in methods else None,
    )
    rows = run_sweep(spec)
    out = _merged(args, "out")
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
        log.info("wrote %d rows to %s", len(rows), out)
    else:
        write_csv(rows, sys.stdout)
    plot = _merged(args, "plot")
    if plot:
        from .plotting import save_sweep_plot

        save_sweep_plot(rows, plot)
        log.info("rendered figure to %s", plot)
    return 0


def _cmd_mc(args) -> int:
    result = estimate_bep(_params(args), _channel(args),
                          parse_rule(_merged(args, "rule", "opt")), _trial_config(args))
    print(f"bep = {result.bep_hat:.17g}")
    print(f"errors = {result.errors}")
    print(f"trials = {result.trials}")
    print(f"ci_low = {result.ci_low:.17g}")
    print(f"ci_high = {result.ci_high:.17g}")
    print(f"seed = {result.seed}")
    return 0


def _cmd_selftest(args) -> int:
    names = None
    if args.checks:
        names = [c.strip() for c in args.checks.split(",") if c.strip()]
    results = run_selftest(names)
    print(format_report(results))
    return 0 if all(r.passed for r in results) else 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(stream=sys.stderr,
                            level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command != "selftest":
            _attach_config(args)
        handler = {
            "threshold": _cmd_threshold,
            "bep": _cmd_bep,
            "sweep": _cmd_sweep,
            "mc": _cmd_mc,
            "selftest": _cmd_selftest,
        }[args.command]
        return handler(args)
    except (SweepValidationError, DegenerateChannelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (_bep.IntegrationError, _bep.ProbabilityBoundsError, ArithmeticError,
            RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
