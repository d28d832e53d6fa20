"""plotgen command line: render ternary or divergence plots from CSVs."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .csvio import PlotgenError
from .divergence import render_divergence
from .jobs import DEFAULT_COLORS, PlotJob
from .ternary import render_ternary


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotgen",
                                     description="Plot simplex trajectories and divergence traces.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in ("ternary", "divergence"):
        p = sub.add_parser(mode)
        p.add_argument("--inputs", nargs="+", required=True, help="input CSV files")
        p.add_argument("--out", required=True, help="output image path")
        p.add_argument("--colors", nargs="+", default=list(DEFAULT_COLORS))
        p.add_argument("--title", default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.mode == "ternary":
        job = PlotJob(trajectory_paths=args.inputs, colors=tuple(args.colors),
                      output=args.out, title=args.title)
        render = render_ternary
    else:
        job = PlotJob(divergence_paths=args.inputs, colors=tuple(args.colors),
                      output=args.out, title=args.title)
        render = render_divergence
    try:
        print(render(job))
    except PlotgenError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
