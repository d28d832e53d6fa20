#!/usr/bin/env python3
"""Regenerate every preset scenario: CSVs plus check verdicts.

Usage: python scripts/run_figures.py [outdir]

Writes <outdir>/<id>_pop*.csv (+ divergence CSVs where configured) and a
verdicts.txt with the check output of every preset.  If the plotgen package
is installed, ternary plots are rendered next to the CSVs.
"""

import os
import shutil
import subprocess
import sys

from evodyn.cli import check_lines, run_populations, write_outputs
from evodyn.presets import REGISTRY, figure


def main() -> int:
    outdir = sys.argv[1] if len(sys.argv) > 1 else "figures_out"
    os.makedirs(outdir, exist_ok=True)
    verdict_path = os.path.join(outdir, "verdicts.txt")
    with open(verdict_path, "w", encoding="utf-8") as fh:
        for fid in sorted(REGISTRY):
            cfg = figure(fid)
            trajs = run_populations(cfg)
            files = write_outputs(cfg, trajs, outdir)
            print(f"{fid}: wrote {len(files)} files")
            fh.write(f"[{fid}]\n")
            for line in check_lines(cfg, trajs, seed=0):
                fh.write(line + "\n")
            fh.write("\n")
            if shutil.which("plotgen"):
                traj_csvs = [f for f in files if "_pop" in os.path.basename(f)]
                png = os.path.join(outdir, f"{fid}_ternary.png")
                subprocess.run(["plotgen", "ternary", "--inputs", *traj_csvs,
                                "--out", png], check=False)
    print(f"verdicts in {verdict_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
