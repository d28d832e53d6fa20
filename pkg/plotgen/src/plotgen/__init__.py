"""Plots for simplex-trajectory and divergence-trace CSV files."""

from .csvio import PlotgenError, read_divergences, read_trajectory
from .ternary import DEFAULT_COLORS, render_ternary, to_xy, TRIANGLE
from .divergence import render_divergence
from .jobs import PlotJob

__version__ = "0.1.0"
