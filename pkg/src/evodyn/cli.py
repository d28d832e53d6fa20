"""Command-line surface: run scenarios, emit presets, scan predicates, check claims.

Exit codes: 0 success, 2 config validation failure, 3 runtime domain error.
CSV output is deterministic: fixed column order, 17-significant-digit floats.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
from typing import List, Optional, Tuple

from . import presets
from .config import (ScenarioConfig, build_dynamic, build_geometry,
                     build_incentive, geometry_escort, load_config,
                     resolve_divergence, target_state)
from .dynamics import Trajectory, run_trajectory
from .errors import ConfigError, EvodynError
from .stability import (convergence_detect, iss_check, lyapunov_trace,
                        multipop_lyapunov_trace, neighborhood_report,
                        region_scan)


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _write_csv(path: str, header: List[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def run_populations(cfg: ScenarioConfig) -> List[Trajectory]:
    return [
        run_trajectory(build_dynamic(pop, cfg.boundary_policy), pop.x0, cfg.steps)
        for pop in cfg.populations
    ]


def write_outputs(cfg: ScenarioConfig, trajs: List[Trajectory], outdir: str) -> List[str]:
    os.makedirs(outdir, exist_ok=True)
    written = []
    for i, (pop, traj) in enumerate(zip(cfg.populations, trajs)):
        path = os.path.join(outdir, f"{cfg.output}_pop{i}.csv")
        header = ["pop", "step", "t"] + [f"x_{j}" for j in range(pop.n)]
        rows = (
            [str(i), str(int(k)), _fmt(t)] + [_fmt(c) for c in state]
            for k, t, state in zip(traj.steps, traj.times, traj.states)
        )
        _write_csv(path, header, rows)
        written.append(path)
    if cfg.divergences:
        path = os.path.join(outdir, f"{cfg.output}_divergences.csv")
        header = ["pop", "step", "t", "divergence_name", "value"]

        def rows():
            for i, (pop, traj) in enumerate(zip(cfg.populations, trajs)):
                tgt = target_state(cfg, pop)
                for name_key in cfg.divergences:
                    name, fn = resolve_divergence(name_key, pop)
                    for k, t, state in zip(traj.steps, traj.times, traj.states):
                        try:
                            val = fn(tgt, state)
                        except EvodynError:
                            val = float("nan")
                        yield [str(i), str(int(k)), _fmt(t), name, _fmt(val)]

        _write_csv(path, header, rows())
        written.append(path)
    return written


def _runtime_problems(trajs: List[Trajectory]) -> List[str]:
    problems = []
    for i, traj in enumerate(trajs):
        for e in traj.events:
            if e.kind == "evaluation_error":
                problems.append(f"pop{i} step {e.step}: {e.detail}")
    return problems


def cmd_run_single(path: str, outdir: str) -> Tuple[int, str]:
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        return 2, f"{path}: {exc}"
    try:
        trajs = run_populations(cfg)
        written = write_outputs(cfg, trajs, outdir)
    except EvodynError as exc:
        return 3, f"{path}: {exc}"
    problems = _runtime_problems(trajs)
    if problems:
        return 3, f"{path}: " + "; ".join(problems)
    return 0, "\n".join(written)


def cmd_run(args) -> int:
    paths = args.config
    if len(paths) == 1:
        code, msg = cmd_run_single(paths[0], args.output_dir)
        print(msg, file=sys.stderr if code else sys.stdout)
        return code
    worst = 0
    with concurrent.futures.ProcessPoolExecutor(
            max_workers=min(len(paths), os.cpu_count() or 1)) as pool:
        futures = {pool.submit(cmd_run_single, p, args.output_dir): p for p in paths}
        for fut in concurrent.futures.as_completed(futures):
            code, msg = fut.result()
            print(msg, file=sys.stderr if code else sys.stdout)
            worst = max(worst, code)
    return worst


def cmd_figure(args) -> int:
    try:
        cfg = presets.figure(args.id)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    if args.run:
        os.makedirs(args.output_dir, exist_ok=True)
        path = os.path.join(args.output_dir, f"{cfg.output}_config.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(cfg.to_json() + "\n")
        code, msg = cmd_run_single(path, args.output_dir)
        print(msg, file=sys.stderr if code else sys.stdout)
        return code
    print(cfg.to_json())
    return 0


def cmd_scan(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 2
    os.makedirs(args.output_dir, exist_ok=True)
    try:
        for i, pop in enumerate(cfg.populations):
            incentive = build_incentive(pop)
            kwargs = {}
            if args.predicate == "eiss":
                kwargs["escort"] = geometry_escort(pop)
            elif args.predicate == "giss":
                kwargs["metric"] = build_geometry(pop)
            tgt = target_state(cfg, pop)
            pts, vals = region_scan(incentive, tgt, args.resolution,
                                    predicate=args.predicate, **kwargs)
            path = os.path.join(args.output_dir, f"{cfg.output}_scan_pop{i}.csv")
            rows = ([_fmt(p[0]), _fmt(p[1]), _fmt(p[2]), _fmt(v)]
                    for p, v in zip(pts, vals))
            _write_csv(path, ["x1", "x2", "x3", "value"], rows)
            print(path)
    except EvodynError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 3
    return 0


def check_lines(cfg: ScenarioConfig, trajs: List[Trajectory], seed: int) -> List[str]:
    """Line-oriented key=value verdicts for a completed run."""
    multi = len(cfg.populations) > 1
    lines: List[str] = []
    all_converged = True
    for i, (pop, traj) in enumerate(zip(cfg.populations, trajs)):
        prefix = f"pop{i}_" if multi else ""
        tgt = target_state(cfg, pop)
        step = convergence_detect(traj, tgt, cfg.epsilon)
        converged = step is not None
        all_converged &= converged
        lines.append(f"{prefix}converged={'true' if converged else 'false'}")
        if converged:
            lines.append(f"{prefix}converged_step={step}")
        for name_key in cfg.divergences:
            name, _ = resolve_divergence(name_key, pop)
            spec = _trace_spec(name_key, pop)
            trace = lyapunov_trace(traj, spec, tgt)
            lines.append(f"{prefix}{name}={trace.verdict}")
        incentive = build_incentive(pop)
        try:
            report = neighborhood_report(
                "iss", lambda x: iss_check(incentive, tgt, x), tgt,
                samples=200, seed=seed)
            lines.append(f"{prefix}iss_fraction={report.fraction_satisfied:.6g}")
            lines.append(f"{prefix}iss_min_margin={report.min_margin:.6g}")
        except EvodynError:
            lines.append(f"{prefix}iss_fraction=nan")
    if multi:
        if cfg.divergences:
            specs = [_trace_spec(cfg.divergences[0], pop) for pop in cfg.populations]
            targets = [target_state(cfg, pop) for pop in cfg.populations]
            L = multipop_lyapunov_trace(trajs, specs, targets)
            lines.append(f"L={L.verdict}")
        lines.append(f"converged={'true' if all_converged else 'false'}")
    return lines


def _trace_spec(name_key: str, pop):
    """Divergence spec (for lyapunov_trace) from a config entry."""
    if name_key == "kl":
        return "kl"
    if name_key.startswith("q:"):
        return name_key
    if name_key == "escort":
        return geometry_escort(pop)
    return build_geometry(pop)


def cmd_check(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        trajs = run_populations(cfg)
        for line in check_lines(cfg, trajs, args.seed):
            print(line)
    except EvodynError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 3
    problems = _runtime_problems(trajs)
    if problems:
        print("; ".join(problems), file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evodyn",
        description="Simulate incentive dynamics on the simplex and check stability claims.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run scenario configs, write trajectory/divergence CSVs")
    p_run.add_argument("config", nargs="+", help="path(s) to scenario JSON")
    p_run.add_argument("--output-dir", default=".", help="directory for CSV output")
    p_run.add_argument("--seed", type=int, default=0, help="seed for sampling-based predicates")
    p_run.set_defaults(func=cmd_run)

    p_fig = sub.add_parser("figure", help="emit or run a preset scenario")
    p_fig.add_argument("id", help="preset id, e.g. fig1a")
    group = p_fig.add_mutually_exclusive_group()
    group.add_argument("--emit-config", action="store_true", help="print the config JSON (default)")
    group.add_argument("--run", action="store_true", help="run the preset")
    p_fig.add_argument("--output-dir", default=".")
    p_fig.add_argument("--seed", type=int, default=0)
    p_fig.set_defaults(func=cmd_figure)

    p_scan = sub.add_parser("scan", help="evaluate a stability predicate on an interior grid")
    p_scan.add_argument("config")
    p_scan.add_argument("--predicate", choices=("iss", "eiss", "giss"), default="iss")
    p_scan.add_argument("--resolution", type=int, default=30)
    p_scan.add_argument("--output-dir", default=".")
    p_scan.add_argument("--seed", type=int, default=0)
    p_scan.set_defaults(func=cmd_scan)

    p_check = sub.add_parser("check", help="run a scenario and print key=value verdicts")
    p_check.add_argument("config")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.set_defaults(func=cmd_check)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
