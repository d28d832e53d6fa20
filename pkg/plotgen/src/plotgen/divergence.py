"""Divergence-vs-step line plots from the simulator's divergence CSVs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .csvio import PlotgenError, read_divergences
from .jobs import DEFAULT_COLORS, PlotJob


def render_divergence(job: PlotJob) -> str:
    """One line per (population, divergence name); returns the PNG path.

    When KL traces appear alongside other divergences the figure splits into
    two panels so the generalized divergences can be compared against KL.
    """
    if not job.divergence_paths:
        raise PlotgenError("no divergence files given")
    series = {}
    for path in job.divergence_paths:
        series.update(read_divergences(path))
    kl_keys = sorted(k for k in series if k[1] == "kl")
    other_keys = sorted(k for k in series if k[1] != "kl")

    panels = []
    if kl_keys and other_keys:
        panels = [("kl", kl_keys), ("generalized", other_keys)]
    else:
        panels = [("divergences", kl_keys or other_keys)]

    fig, axes = plt.subplots(1, len(panels), figsize=(8.0, 4.0), dpi=100,
                             squeeze=False)
    colors = job.colors or DEFAULT_COLORS
    for ax, (label, keys) in zip(axes[0], panels):
        for i, key in enumerate(keys):
            data = series[key]
            ax.plot(data[:, 0], data[:, 1], color=colors[i % len(colors)],
                    linewidth=1.0, label=f"pop{key[0]} {key[1]}")
        ax.set_xlabel("step")
        ax.set_ylabel(label)
        ax.legend(fontsize=7)
    if job.title:
        fig.suptitle(job.title)
    fig.tight_layout()
    fig.savefig(job.output, metadata={"Software": None})
    plt.close(fig)
    return job.output
