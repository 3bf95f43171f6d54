"""Render sweep results to a figure file next to the CSV output."""

from __future__ import annotations

from typing import Optional, Sequence

from .sweep import SweepRow

_AXIS_LABELS = {
    "gamma": "detection threshold",
    "delta": "noise variance ratio delta",
    "alpha": "resistance ratio alpha",
    "K": "Rician K-factor",
    "N": "samples per symbol N",
}


def save_sweep_plot(rows: Sequence[SweepRow], path: str,
                    title: Optional[str] = None) -> str:
    """Plot BEP curves grouped by (method, rule) and save to ``path``.

    Error rows are skipped; Monte Carlo rows get confidence-interval bars.
    The image format follows the file extension (png, pdf, svg, ...).
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    usable = [r for r in rows if not r.error and r.bep is not None]
    if not usable:
        raise ValueError("no plottable rows (all rows errored or empty)")

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    groups: dict[tuple[str, str], list[SweepRow]] = {}
    for r in usable:
        groups.setdefault((r.method, r.rule), []).append(r)
    for (method, rule), grp in groups.items():
        xs = [r.sweep_value for r in grp]
        ys = [r.bep for r in grp]
        label = f"{method} / {rule}" if len({k[1] for k in groups}) > 1 else method
        if method == "mc" and all(r.ci_low is not None for r in grp):
            lo = [r.bep - r.ci_low for r in grp]
            hi = [r.ci_high - r.bep for r in grp]
            ax.errorbar(xs, ys, yerr=[lo, hi], fmt="o", ms=4, capsize=3, label=label)
        else:
            ax.plot(xs, ys, marker=".", label=label)

    xs_all = [r.sweep_value for r in usable]
    if min(xs_all) > 0 and max(xs_all) / min(xs_all) > 30:
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(_AXIS_LABELS.get(usable[0].sweep_var, usable[0].sweep_var))
    ax.set_ylabel("bit error probability")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
