"""Ternary rendering: 3-coordinate trajectories drawn inside an equilateral triangle.

Vertex convention: e1 at the bottom-left, e2 at the bottom-right, e3 at the
top.  Output is a fixed 800x693 PNG (equilateral aspect) with deterministic
bytes for identical inputs.
"""

from __future__ import annotations

import math
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import PlotgenError, read_trajectory
from .jobs import DEFAULT_COLORS, PlotJob

# corners for e1, e2, e3
TRIANGLE = np.array([
    [0.0, 0.0],
    [1.0, 0.0],
    [0.5, math.sqrt(3.0) / 2.0],
])

FIG_SIZE = (8.0, 6.93)
DPI = 100
_XLIM = (-0.05, 1.05)
# y-limits chosen so data units per pixel match in both directions
_Y_HALF_SPAN = (_XLIM[1] - _XLIM[0]) * (FIG_SIZE[1] / FIG_SIZE[0]) / 2.0
_Y_MID = math.sqrt(3.0) / 4.0
_YLIM = (_Y_MID - _Y_HALF_SPAN, _Y_MID + _Y_HALF_SPAN)


def to_xy(coords) -> np.ndarray:
    """Affine barycentric-to-Cartesian projection (vertices to corners)."""
    c = np.atleast_2d(np.asarray(coords, dtype=float))
    if c.shape[-1] != 3:
        raise PlotgenError(f"ternary projection needs 3 coordinates, got {c.shape[-1]}")
    return c @ TRIANGLE


def _new_axes():
    fig = plt.figure(figsize=FIG_SIZE, dpi=DPI)
    ax = fig.add_axes([0.0, 0.0, 1.0, 1.0])
    ax.set_xlim(*_XLIM)
    ax.set_ylim(*_YLIM)
    ax.set_axis_off()
    return fig, ax


def data_to_pixel(point_xy) -> np.ndarray:
    """Pixel position (col, row from top) of a projected point on the fixed canvas."""
    fig, ax = _new_axes()
    try:
        disp = ax.transData.transform(np.atleast_2d(point_xy))
        height = fig.get_size_inches()[1] * fig.dpi
        return np.column_stack([disp[:, 0], height - disp[:, 1]])[0]
    finally:
        plt.close(fig)


def render_ternary(job: PlotJob) -> str:
    """Draw each trajectory CSV inside the simplex triangle; returns the PNG path."""
    if not job.trajectory_paths:
        raise PlotgenError("no trajectory files given")
    trajectories = []
    for path in job.trajectory_paths:
        states = read_trajectory(path)
        if states.shape[1] != 3:
            raise PlotgenError(f"{path}: ternary rendering needs n=3, got n={states.shape[1]}")
        trajectories.append(states)

    fig, ax = _new_axes()
    edge = np.vstack([TRIANGLE, TRIANGLE[:1]])
    ax.plot(edge[:, 0], edge[:, 1], color="black", linewidth=1.0)
    colors = job.colors or DEFAULT_COLORS
    for i, states in enumerate(trajectories):
        xy = to_xy(states)
        color = colors[i % len(colors)]
        if states.shape[0] == 1:
            ax.plot(xy[:, 0], xy[:, 1], marker="o", markersize=6, color=color)
        else:
            ax.plot(xy[:, 0], xy[:, 1], color=color, linewidth=1.0)
    if job.title:
        ax.set_title(job.title)
    fig.savefig(job.output, metadata={"Software": None})
    plt.close(fig)
    return job.output
