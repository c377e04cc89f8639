"""Command-line front end.

Sub-commands: validate | run | batch | compare | plot. Exit codes:
0 success, 1 scenario validation failure, 2 runtime failure. Batch trials
can run in parallel (--jobs, or the SOAR_SIM_JOBS environment variable);
outputs are assembled in seed order after all trials finish, so results
do not depend on scheduling.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from soar_sim import report as report_mod
from soar_sim.scenario_io import ScenarioError, ScenarioSpec, load_scenario_file
from soar_sim.sim import MODE_NON_SOAR, MODE_SOAR, TrialResult, run_trial
from soar_sim.svg_plot import render_svg
from soar_sim.world import Vec2

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _canonical_mode(mode: str) -> str:
    return MODE_NON_SOAR if mode in ("non-soar", "non_soar") else MODE_SOAR


def _default_jobs() -> int:
    env = os.environ.get("SOAR_SIM_JOBS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _run_one(args: tuple[ScenarioSpec, str, int]) -> TrialResult:
    spec, mode, seed = args
    return run_trial(spec, mode, seed)


def _run_batch(spec: ScenarioSpec, mode: str, trials: int, base_seed: int, jobs: int) -> list[TrialResult]:
    tasks = [(spec, mode, base_seed + i) for i in range(trials)]
    if jobs <= 1 or trials == 1:
        results = [_run_one(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, trials)) as pool:
            results = list(pool.map(_run_one, tasks))
    return sorted(results, key=lambda r: r.seed)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _emit_trials(spec: ScenarioSpec, results: Sequence[TrialResult], out: Path) -> None:
    for result in results:
        stem = f"{spec.name}_{result.mode}_seed{result.seed}"
        _write(out / f"{stem}.traj.csv", report_mod.render_trajectory_csv(result))
        _write(out / f"{stem}.result.yaml", report_mod.render_trial_summary(result, spec.name))


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        load_scenario_file(args.scenario)
    except ScenarioError as exc:
        print(f"INVALID: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"ERROR: cannot read {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print("OK")
    return EXIT_OK


class CliError(Exception):
    """CLI failure carrying the process exit code."""

    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_or_fail(path: str) -> ScenarioSpec:
    try:
        return load_scenario_file(path)
    except ScenarioError as exc:
        raise CliError(f"INVALID: {exc}", EXIT_VALIDATION) from exc
    except OSError as exc:
        raise CliError(f"ERROR: cannot read {path}: {exc}", EXIT_RUNTIME) from exc


def cmd_run(args: argparse.Namespace) -> int:
    spec = _load_or_fail(args.scenario)
    mode = _canonical_mode(args.mode)
    result = run_trial(spec, mode, args.seed)
    out = Path(args.out)
    _emit_trials(spec, [result], out)
    sys.stdout.write(report_mod.render_trial_summary(result, spec.name))
    return EXIT_OK


def cmd_batch(args: argparse.Namespace) -> int:
    spec = _load_or_fail(args.scenario)
    mode = _canonical_mode(args.mode)
    results = _run_batch(spec, mode, args.trials, args.seed, args.jobs)
    summary = report_mod.summarize_mode(mode, results)
    out = Path(args.out)
    _emit_trials(spec, results, out)
    table = report_mod.render_mode_table(summary, spec.name)
    _write(out / f"{spec.name}_{mode}_summary.txt", table)
    _write(out / f"{spec.name}_{mode}_summary.csv", report_mod.render_mode_csv(summary))
    if args.format == "delimited":
        sys.stdout.write(report_mod.render_mode_csv(summary))
    elif args.format == "structured":
        sys.stdout.write(report_mod.render_mode_yaml(summary, spec.name))
    else:
        sys.stdout.write(table)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    spec = _load_or_fail(args.scenario)
    soar_results = _run_batch(spec, MODE_SOAR, args.trials, args.seed, args.jobs)
    non_soar_results = _run_batch(spec, MODE_NON_SOAR, args.trials, args.seed, args.jobs)
    rep = report_mod.build_comparison(spec.name, soar_results, non_soar_results)
    out = Path(args.out)
    _emit_trials(spec, soar_results, out)
    _emit_trials(spec, non_soar_results, out)
    table = report_mod.render_comparison_table(rep)
    _write(out / f"{spec.name}_compare.txt", table)
    _write(out / f"{spec.name}_compare.csv", report_mod.render_comparison_csv(rep))
    if args.format == "delimited":
        sys.stdout.write(report_mod.render_comparison_csv(rep))
    elif args.format == "structured":
        sys.stdout.write(report_mod.render_comparison_yaml(rep))
    else:
        sys.stdout.write(table)
    return EXIT_OK


def _read_trajectory(path: str) -> list[Vec2]:
    points = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "x" not in reader.fieldnames:
            raise ValueError(f"{path}: not a trajectory table (missing x/y columns)")
        for row in reader:
            points.append(Vec2(float(row["x"]), float(row["y"])))
    if not points:
        raise ValueError(f"{path}: empty trajectory")
    return points


def _label_for(path: str) -> str:
    name = Path(path).name
    if MODE_NON_SOAR in name or "non-soar" in name:
        return MODE_NON_SOAR
    if MODE_SOAR in name:
        return MODE_SOAR
    return Path(path).stem


def cmd_plot(args: argparse.Namespace) -> int:
    spec = _load_or_fail(args.scenario)
    trajectories = []
    for path in args.trajectories:
        try:
            trajectories.append((_label_for(path), _read_trajectory(path)))
        except (OSError, ValueError) as exc:
            raise CliError(f"ERROR: {exc}", EXIT_RUNTIME) from exc
    svg = render_svg(spec, trajectories)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soar-sim",
        description="Deterministic 2D navigation trials with per-class obstacle clearances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a scenario file")
    p_validate.add_argument("--scenario", required=True, help="scenario YAML path")
    p_validate.set_defaults(func=cmd_validate)

    def common(p: argparse.ArgumentParser, with_mode: bool = True) -> None:
        p.add_argument("--scenario", required=True, help="scenario YAML path")
        if with_mode:
            p.add_argument("--mode", choices=["soar", "non-soar", "non_soar"], default="soar")
        p.add_argument("--seed", type=int, default=42, help="base seed")
        p.add_argument("--out", default="out", help="artifact output directory")
        p.add_argument("--format", choices=["table", "delimited", "structured"], default="table")
        p.add_argument("--jobs", type=int, default=_default_jobs(),
                       help="parallel trial workers (env SOAR_SIM_JOBS)")

    p_run = sub.add_parser("run", help="run a single trial")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_batch = sub.add_parser("batch", help="run N seeded trials in one mode")
    common(p_batch)
    p_batch.add_argument("--trials", type=int, default=10)
    p_batch.set_defaults(func=cmd_batch)

    p_compare = sub.add_parser("compare", help="run both modes on identical seeds")
    common(p_compare, with_mode=False)
    p_compare.add_argument("--trials", type=int, default=10)
    p_compare.set_defaults(func=cmd_compare)

    p_plot = sub.add_parser("plot", help="render trajectories over the world as SVG")
    p_plot.add_argument("--scenario", required=True, help="scenario YAML path")
    p_plot.add_argument("--out", default="out/plot.svg", help="output SVG path")
    p_plot.add_argument("trajectories", nargs="+", help="trajectory CSV files")
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        print("ERROR: --trials must be >= 1", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        return args.func(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ScenarioError as exc:
        print(f"INVALID: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
