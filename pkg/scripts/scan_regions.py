#!/usr/bin/env python3
"""Stability-margin fields over the simplex for the q-replicator family.

Usage: python scripts/scan_regions.py [resolution] [outdir]

Sweeps q and writes one CSV per value with columns x1,x2,x3,value; the sign
pattern shows where the incentive-stability inequality holds.
"""

import os
import sys

from evodyn import (FitnessLandscape, IncentiveSpec, barycenter, region_scan,
                    rsp_matrix)

Q_VALUES = (0.5, 0.78, 1.0, 1.5, 2.0, 2.5)


def main() -> int:
    resolution = int(sys.argv[1]) if len(sys.argv) > 1 else 40
    outdir = sys.argv[2] if len(sys.argv) > 2 else "scan_out"
    os.makedirs(outdir, exist_ok=True)
    land = FitnessLandscape.linear(rsp_matrix(-1.0, -2.0))
    cand = barycenter(3)
    for q in Q_VALUES:
        inc = IncentiveSpec("q_replicator", land, q=q)
        pts, vals = region_scan(inc, cand, resolution, predicate="iss")
        path = os.path.join(outdir, f"iss_q{q:g}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("x1,x2,x3,value\n")
            for p, v in zip(pts, vals):
                fh.write(f"{p[0]:.17g},{p[1]:.17g},{p[2]:.17g},{v:.17g}\n")
        frac = float((vals > 0).mean())
        print(f"q={q}: {len(vals)} points, fraction positive {frac:.3f} -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
