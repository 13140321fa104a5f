"""Polyline SVG charts for report tables (matplotlib, Agg backend)."""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_STYLE = {
    "svg.hashsalt": "autdim",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "lines.markersize": 3.5,
}


def line_plot(path: str, x: Sequence[float], series: Mapping[str, Sequence[float]], xlabel: str,
              ylabel: str, title: str = "", logy: bool = False) -> str:
    """Write one polyline per series; non-positive values are dropped on a log axis."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.2))
        xs = np.asarray(x, dtype=float)
        for label, ys in series.items():
            ys = np.asarray(ys, dtype=float)
            keep = np.isfinite(ys) & ((ys > 0) if logy else True)
            ax.plot(xs[keep], ys[keep], marker="o", label=label)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return path


def orbit_plot(path: str, points, title: str = "") -> str:
    """Planar trace of the first coordinate of an orbit."""
    P = np.atleast_2d(np.asarray(points, dtype=complex))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 4.0))
        ax.plot(P[:, 0].real, P[:, 0].imag)
        ax.set_aspect("equal")
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return path
