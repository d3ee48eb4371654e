"""Matplotlib figures rendered next to the delimited outputs of a run."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .energy import EnergyTrace, gronwall_bound

FLOOR = 1e-300


def log_slope_fit(times, values, rel_floor: float = 1e-12) -> float:
    """Least-squares slope of log(values) vs time over the clean segment.

    Rows below rel_floor * max(values) are dropped (rounding floor).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    keep = y > rel_floor * max(y.max(), FLOOR)
    t, y = t[keep], y[keep]
    if len(t) < 2:
        raise ValueError("not enough positive samples for a log-slope fit")
    coeffs = np.polyfit(t, np.log(y), 1)
    return float(coeffs[0])


def trace_decay_figure(trace: EnergyTrace, out_path: str, eps: float | None = None) -> str:
    """Energy distance on a log scale with its Gronwall envelope."""
    t = trace.times
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(t, np.maximum(trace.w_a_sq, FLOOR), label="energy distance sq")
    if trace.lam > 0:
        e = eps if eps is not None else 0.0
        env = [gronwall_bound(trace.w_a_sq[0], trace.lam, e, ti - t[0]) for ti in t]
        ax.semilogy(t, np.maximum(env, FLOOR), "--", label="Gronwall envelope")
    try:
        slope = log_slope_fit(t, trace.w_a_sq)
        caption = f"log-slope fit: {slope:.6g} per unit time"
    except ValueError:
        caption = "log-slope fit: n/a"
    ax.set_xlabel("t")
    ax.set_ylabel("squared energy norm of the difference")
    ax.set_title(caption, fontsize=10)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return out_path


def sweep_figure(rows: list, delta: float | None, out_path: str) -> str:
    """Final H1 gap against node density, with the threshold marked."""
    pts = [(r["d_n"], r["final_h1"]) for r in rows if r["d_n"] != "" and r["final_h1"] != ""]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if pts:
        d, h = zip(*pts)
        ax.loglog(d, np.maximum(h, FLOOR), "o-")
    if delta is not None and delta > 0:
        ax.axvline(delta, color="crimson", linestyle=":", label=f"threshold {delta:.3g}")
        ax.legend()
    ax.set_xlabel("node density")
    ax.set_ylabel("final H1 gap")
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return out_path


def ratio_histogram_figure(ratios, out_path: str, title: str = "inequality tightness") -> str:
    """Histogram of check ratios (LHS over RHS at the estimated constants)."""
    vals = np.asarray(list(ratios), dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(vals, bins=30)
    ax.set_xlabel("lhs / rhs")
    ax.set_ylabel("count")
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return out_path
