"""Figures written next to the machine-readable reports."""

from __future__ import annotations

import os

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure


def report_figure(width: float = 6.0, height: float | None = None) -> Figure:
    golden_ratio = (5**0.5 - 1.0) / 2.0
    fig = Figure(figsize=(width, height or width * golden_ratio), facecolor="w")
    FigureCanvasAgg(fig)
    return fig


def _style(ax, xlabel: str, ylabel: str, title: str = ""):
    ax.set_xlabel(xlabel, fontsize=12)
    ax.set_ylabel(ylabel, fontsize=12)
    if title:
        ax.set_title(title, fontsize=12)
    ax.tick_params(labelsize=10)
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)


def _save(fig: Figure, path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def plot_class_histogram(observed, expected, path: str, title: str = "") -> str:
    """Observed class fractions against the source law."""
    fig = report_figure()
    ax = fig.add_subplot(111)
    xs = range(1, len(observed) + 1)
    ax.bar([x - 0.2 for x in xs], observed, width=0.4, label="simulated", color="#4c72b0")
    ax.bar([x + 0.2 for x in xs], expected, width=0.4, label="exact", color="#dd8452")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"class {x}" for x in xs])
    ax.legend(frameon=False)
    _style(ax, "analyzer class", "fraction of heralded pairs", title)
    return _save(fig, path)


def plot_bound_curve(curve, path: str, measured: dict | None = None, title: str = "") -> str:
    """Information bound against the number of S1 pairs, log scale."""
    ms = [row[0] for row in curve]
    bounds = [row[2] for row in curve]
    fig = report_figure()
    ax = fig.add_subplot(111)
    ax.semilogy(ms, bounds, "o-", color="#4c72b0", ms=4, label="H(b1) / 2^(m-1)")
    for name, value in (measured or {}).items():
        if value > 0:
            ax.axhline(value, ls="--", lw=1, color="#c44e52", label=name)
    ax.legend(frameon=False)
    _style(ax, "S1 pairs m", "bits", title)
    return _save(fig, path)
