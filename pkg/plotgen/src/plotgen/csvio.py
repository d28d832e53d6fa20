"""Readers for the simulator's CSV schemas.

Trajectory files: pop,step,t,x_0,...,x_{n-1}
Divergence files: pop,step,t,divergence_name,value
"""

from __future__ import annotations

import csv
from typing import Dict, List, Tuple

import numpy as np


class PlotgenError(ValueError):
    pass


def _read_rows(path: str) -> Tuple[List[str], List[List[str]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotgenError(f"{path}: empty file") from None
        rows = list(reader)
    return header, rows


def read_trajectory(path: str) -> np.ndarray:
    """Load one trajectory file; returns the (samples, n) state array."""
    header, rows = _read_rows(path)
    required = ["pop", "step", "t"]
    missing = [c for c in required if c not in header]
    coord_cols = [c for c in header if c.startswith("x_")]
    if missing or not coord_cols:
        raise PlotgenError(
            f"{path}: missing columns {missing + (['x_*'] if not coord_cols else [])}")
    if not rows:
        raise PlotgenError(f"{path}: no trajectory samples")
    idx = [header.index(c) for c in sorted(coord_cols, key=lambda c: int(c[2:]))]
    return np.array([[float(r[i]) for i in idx] for r in rows])


def read_divergences(path: str) -> Dict[Tuple[str, str], np.ndarray]:
    """Load a divergence file; maps (pop, divergence_name) to (step, value) pairs."""
    header, rows = _read_rows(path)
    missing = [c for c in ("pop", "step", "divergence_name", "value") if c not in header]
    if missing:
        raise PlotgenError(f"{path}: missing columns {missing}")
    if not rows:
        raise PlotgenError(f"{path}: no divergence samples")
    i_pop = header.index("pop")
    i_step = header.index("step")
    i_name = header.index("divergence_name")
    i_val = header.index("value")
    series: Dict[Tuple[str, str], list] = {}
    for r in rows:
        series.setdefault((r[i_pop], r[i_name]), []).append(
            (float(r[i_step]), float(r[i_val])))
    return {k: np.array(v) for k, v in series.items()}
