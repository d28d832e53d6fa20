from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

# the six-color trajectory cycle used across the reference plots
DEFAULT_COLORS = ("blue", "green", "red", "cyan", "magenta", "yellow")


@dataclass
class PlotJob:
    """One rendering task: input CSVs, color cycle, output image, title."""

    trajectory_paths: List[str] = field(default_factory=list)
    divergence_paths: List[str] = field(default_factory=list)
    colors: tuple = DEFAULT_COLORS
    output: str = "plot.png"
    title: Optional[str] = None
