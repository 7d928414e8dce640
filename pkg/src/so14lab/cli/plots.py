"""Figures written next to the CSV/JSON outputs (non-interactive backend)."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .report import PlotData  # noqa: E402


def render(plot: PlotData) -> bytes:
    """PNG bytes for ``plot``; metadata is stripped so output is reproducible."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=100)
    x = np.asarray(plot.columns[plot.x]) if plot.x else None
    for name in plot.y:
        y = np.asarray(plot.columns[name], dtype=float)
        xs = np.arange(y.size) if x is None else x
        if plot.kind == "scatter":
            ax.scatter(xs, y, s=8, label=name)
        else:
            ax.plot(xs, y, lw=1.2, label=name)
    if plot.logx:
        ax.set_xscale("log")
    if plot.logy:
        ax.set_yscale("log")
    ax.set_xlabel(plot.x or "index")
    ax.set_title(plot.title)
    if len(plot.y) > 1:
        ax.legend(fontsize=7)
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="png", metadata={"Software": None})
    plt.close(fig)
    return buf.getvalue()
