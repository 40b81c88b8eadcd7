"""Command-line entry point: gen-map, gt, bench, plot."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from ..worldmap import SceneGenerationError, save_map
from .config import BenchmarkConfig, ConfigError, load_config
from .plots import PlotError, emit_plots
from .problems import ProblemGenerationError, generate_problems, load_problems, save_problems, space_from_config
from .runner import format_summary, load_octree, run_benchmark

EXIT_OK, EXIT_CONFIG, EXIT_GENERATION = 0, 2, 3

log = logging.getLogger("sbobench")


def _config(args) -> BenchmarkConfig:
    cfg = load_config(args.config) if args.config else BenchmarkConfig()
    if getattr(args, "seed", None) is not None:
        if args.seed < 0 or args.seed >= 2**64:
            raise ConfigError(f"--seed: must be an unsigned 64-bit integer, got {args.seed}")
        cfg = replace(cfg, master_seed=args.seed)
    return cfg


def _iterations(args) -> bool:
    return getattr(args, "budget_mode", "wallclock") == "iterations"


def cmd_gen_map(args) -> int:
    cfg = _config(args)
    os.makedirs(args.out, exist_ok=True)
    octree = load_octree(cfg)
    path = os.path.join(args.out, args.name)
    size = save_map(octree, path)
    print(f"wrote {path} ({size} bytes, {octree.occupied_count} occupied voxels, {octree.node_count} nodes)")
    return EXIT_OK


def cmd_gt(args) -> int:
    cfg = _config(args)
    os.makedirs(args.out, exist_ok=True)
    octree = load_octree(cfg)
    problems = generate_problems(
        cfg, octree, space_from_config(cfg), iterations_mode=_iterations(args),
        progress=lambda pid, p: print(f"problem {pid}: ground truth {p.ground_truth_length:.3f} m", flush=True),
    )
    path = os.path.join(args.out, args.name)
    save_problems(problems, path)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _config(args)
    problems = load_problems(args.problems) if args.problems else None

    def progress(rec):
        if args.verbose:
            print(f"{rec.planner:<16} problem {rec.problem_id:>3} repeat {rec.repeat}: {rec.status.value}", flush=True)

    result = run_benchmark(cfg, args.out, _iterations(args), problems=problems, progress=progress)
    print(format_summary(result.summary))
    print(f"results: {result.results_path}")
    if result.aborted:
        print(f"campaign aborted early: {result.aborted}", file=sys.stderr)
    if not args.no_plots:
        for p in emit_plots(result.results_path, args.out):
            print(f"figure: {p}")
    return EXIT_OK


def cmd_plot(args) -> int:
    for p in emit_plots(args.results, args.out, args.space):
        print(f"figure: {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbobench", description="Sampling-based optimal planner benchmark.")
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budget=True):
        p.add_argument("--config", help="benchmark YAML file (defaults apply when omitted)")
        p.add_argument("--seed", type=int, help="override master_seed")
        p.add_argument("--out", default="out", help="output directory")
        if budget:
            p.add_argument("--budget-mode", choices=("wallclock", "iterations"), default="wallclock")

    p = sub.add_parser("gen-map", help="generate the configured scene and save it as a map file")
    common(p, budget=False)
    p.add_argument("--name", default="map.sbom")
    p.set_defaults(func=cmd_gen_map)

    p = sub.add_parser("gt", help="generate problems with ground-truth paths")
    common(p)
    p.add_argument("--name", default="problems.json")
    p.set_defaults(func=cmd_gt)

    p = sub.add_parser("bench", help="run the benchmark campaign")
    common(p)
    p.add_argument("--problems", help="reuse problems written by the gt command")
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("plot", help="draw figures from a results CSV")
    p.add_argument("results")
    p.add_argument("--out", default=None)
    p.add_argument("--space", default=None, help="label for the figures (read from metadata when omitted)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SceneGenerationError, ProblemGenerationError) as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except PlotError as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
