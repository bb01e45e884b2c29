"""Figure rendering for sweep results and schedules.

Everything draws straight to files through the Agg backend so the report
path works in headless environments. The CSV stays the primary data
interface; these figures are a convenience view of the same numbers.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .runner import SweepResult
from .schedule import AnnealSchedule

_SAVE_KW = dict(dpi=140, bbox_inches="tight")


def plot_sweep(result: SweepResult, path: str) -> None:
    """Ratio and ground-state probability vs alpha, one panel each.

    A third panel with the Gibbs distance appears only when the sweep
    computed it. Confidence bands are the propagated 95% intervals.
    """
    records = result.records
    alphas = np.array([r.alpha for r in records])
    ratios = np.array([r.summary.ratio if r.summary.ratio is not None else np.nan
                       for r in records])
    ci_lo = np.array([r.summary.ratio_ci[0] if r.summary.ratio_ci else np.nan
                      for r in records])
    ci_hi = np.array([r.summary.ratio_ci[1] if r.summary.ratio_ci else np.nan
                      for r in records])
    p_gs = np.array([r.summary.p_gs for r in records])
    tvs = [r.tv_gibbs for r in records]
    has_tv = any(t is not None for t in tvs)

    n_panels = 3 if has_tv else 2
    fig, axes = plt.subplots(1, n_panels, figsize=(4.2 * n_panels, 3.4))

    ax = axes[0]
    ax.axhline(1.0, color="0.6", lw=0.8, ls="--")
    ax.fill_between(alphas, ci_lo, ci_hi, alpha=0.25, color="tab:blue", lw=0)
    ax.plot(alphas, ratios, "o-", ms=4, color="tab:blue")
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel(r"$P_I / P_C$")
    # symlog keeps zero-count ratios on the canvas
    ax.set_yscale("symlog", linthresh=1e-3)
    label = result.provenance.get("model", "")
    ax.set_title(f"isolated enhancement ({label})")

    ax = axes[1]
    ax.plot(alphas, p_gs, "s-", ms=4, color="tab:green")
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel(r"$P_{GS}$")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("ground-state probability")

    if has_tv:
        ax = axes[2]
        tv_vals = np.array([np.nan if t is None else t for t in tvs])
        ax.plot(alphas, tv_vals, "d-", ms=4, color="tab:red")
        ax.set_xlabel(r"$\alpha$")
        ax.set_ylabel("TV distance to Gibbs")
        ax.set_title("distance from equilibrium")

    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_schedule(schedule: AnnealSchedule, path: str, alpha: float = 1.0,
                  temperature: float = 0.22) -> None:
    """A(s) and alpha*B(s) with the temperature line and both crossings."""
    s = np.linspace(0.0, 1.0, 401)
    a, b = schedule.evaluate(s)
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(s, a, color="tab:blue", label="A(s)")
    ax.plot(s, alpha * b, color="tab:orange",
            label=rf"$\alpha \cdot B(s)$, $\alpha$={alpha:g}")
    ax.axhline(temperature, color="0.4", lw=0.8, ls=":",
               label=f"T = {temperature:g} GHz")
    s_a, s_b = schedule.crossings(alpha, temperature)
    for value, color, name in ((s_a, "tab:blue", "s_A"), (s_b, "tab:orange", "s_B")):
        if value is not None:
            ax.axvline(value, color=color, lw=0.8, ls="--")
            ax.annotate(name, (value, temperature), textcoords="offset points",
                        xytext=(4, 6), fontsize=8, color=color)
    ax.set_xlabel("s")
    ax.set_ylabel("energy scale (GHz)")
    ax.set_yscale("symlog", linthresh=0.01)
    ax.legend(fontsize=8)
    ax.set_title(schedule.name)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
