"""Figure rendering for the report paths.

When a command writes delimited output to a file, a matplotlib figure is
rendered next to it (same stem, .png).  Figures are a convenience view; the
CSV stays the machine-readable product.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

import numpy as np

from .montecarlo import EstimateRow


def figure_path_for(out_path) -> Path:
    return Path(out_path).with_suffix(".png")


def save_decay_curve(rows: list[EstimateRow], w_ref, out_path) -> Path:
    """Plot -(1/gamma) log p_hat against gamma, with the reference rate if given."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    gammas = [r.gamma for r in rows if r.log_rate is not None]
    vals = [-r.log_rate for r in rows if r.log_rate is not None]
    ax.plot(gammas, vals, "o-", label=r"$-\gamma^{-1}\log \hat p$")
    lo = [-np.log(r.ci_high) / r.gamma for r in rows if r.log_rate is not None and r.ci_high > 0]
    hi = [-np.log(r.ci_low) / r.gamma if r.ci_low > 0 else np.nan
          for r in rows if r.log_rate is not None]
    if len(lo) == len(vals):
        ax.fill_between(gammas, lo, hi, alpha=0.2, label="95% interval")
    if w_ref is not None:
        ax.axhline(w_ref, color="k", ls="--", lw=1, label=f"reference w = {w_ref:.6g}")
    ax.set_xlabel(r"speed $\gamma$")
    ax.set_ylabel(r"$-\gamma^{-1}\log \hat p$")
    ax.set_xscale("log", base=2)
    ax.legend(frameon=False)
    fig.tight_layout()
    target = figure_path_for(out_path)
    fig.savefig(target, dpi=150)
    plt.close(fig)
    return target


def save_most_likely_path(times, values, out_path, exit_times=None) -> Path:
    """Plot the sampled most-likely exit path components."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for i, row in enumerate(np.atleast_2d(values)):
        ax.plot(times, row, label=f"component {i + 1}")
    if exit_times is not None:
        for t in np.atleast_1d(exit_times):
            ax.axvline(float(t), color="k", ls=":", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("most likely path")
    ax.legend(frameon=False)
    fig.tight_layout()
    target = figure_path_for(out_path)
    fig.savefig(target, dpi=150)
    plt.close(fig)
    return target
