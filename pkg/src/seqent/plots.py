"""Figure rendering for experiment reports.

All figures are written as SVG with a fixed hash salt and no date metadata,
so a fixed report renders to byte-identical files on every run.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SVG_HASHSALT = "seqent"


def save_svg(fig, path):
    """Write a figure as a byte-reproducible SVG."""
    with plt.rc_context({"svg.hashsalt": SVG_HASHSALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def continuity_figure(rows, unit="nats"):
    """Scatter of |Delta h| against eps for every seed, with the budget curve.

    rows: iterables with attributes eps, abs_dh, budget (one per trial).
    """
    rows = list(rows)
    if not rows:
        raise ValueError("continuity report is empty")
    eps = np.array([r.eps for r in rows])
    dh = np.array([r.abs_dh for r in rows])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(eps, dh, "o", ms=4, alpha=0.6, label="|Δh| per seed")
    grid = sorted(set(eps.tolist()))
    budgets = []
    for e in grid:
        budgets.append(max(r.budget for r in rows if r.eps == e))
    ax.plot(grid, budgets, "k--", lw=1.2, label="budget(ε, l)")
    medians = [float(np.median(dh[eps == e])) for e in grid]
    ax.plot(grid, medians, "s-", ms=5, lw=1.0, label="median |Δh|")
    ax.set_xlabel("ε")
    ax.set_ylabel(f"|Δh| ({unit})")
    ax.set_title("entropy shift under perturbation vs budget")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    return fig


def return_time_figure(rtc, p=None, unit="mass"):
    """Return-time histogram with a geometric overlay of matching mean.

    rtc: a ReturnTimeCensus. p defaults to 1 / mean_return, the geometric
    parameter with the same expected return time.
    """
    if rtc.total < 1:
        raise ValueError("return-time census is empty")
    if p is None:
        p = 1.0 / rtc.mean_return()
    times = rtc.times.astype(int)
    masses = rtc.masses()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.bar(times, masses, width=0.8, alpha=0.7, label="observed mass")
    grid = np.arange(1, int(times.max()) + 1)
    geo = p * (1.0 - p) ** (grid - 1)
    ax.plot(grid, geo, "k.-", lw=1.0, ms=4, label=f"geometric(p={p:.4g})")
    ax.set_xlabel("return time")
    ax.set_ylabel(unit)
    ax.set_title("return-time distribution")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig
