"""Benchmark campaigns: every planner on every problem, several times, scored and logged."""

from __future__ import annotations

import csv
import json
import logging
import os
import statistics
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from ..metrics import RunRecord, classify_status, normalize_length, path_length, path_smoothness
from ..planners import Budget, PlannerParams, Problem, Status, get_planner, interpolate_path
from ..statespace import StateSpace
from ..worldmap import OccupancyOctree, generate_scene, load_map
from .config import BenchmarkConfig
from .problems import BenchProblem, body_from_config, generate_problems, space_from_config

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "planner", "problem_id", "repeat", "status", "raw_length_m", "normalized_length", "smoothness_rad",
    "wall_time_s", "iterations", "samples", "seed",
)


def run_seed(master_seed: int, planner: str, problem_id: int, repeat: int) -> int:
    """64-bit seed derived from (master seed, planner name, problem, repeat)."""
    ss = np.random.SeedSequence([master_seed, zlib.crc32(planner.encode()), problem_id, repeat])
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def load_octree(config: BenchmarkConfig, seed: int | None = None) -> OccupancyOctree:
    if config.map_file:
        return load_map(config.map_file)
    return generate_scene(config.scene_spec(seed))


def planner_budget(config: BenchmarkConfig, iterations_mode: bool) -> Budget:
    if iterations_mode:
        return Budget.iterations(config.planner_iterations)
    return Budget.wall_clock(config.planner_timeout)


def run_once(planner: str, bp: BenchProblem, config: BenchmarkConfig, space: StateSpace, octree: OccupancyOctree,
             budget: Budget, repeat: int, params: PlannerParams | None = None) -> RunRecord:
    """One planner run scored against the problem's ground truth. Exceptions become Failure rows."""
    seed = run_seed(config.master_seed, planner, bp.id, repeat)
    t0 = time.perf_counter()
    try:
        problem = Problem(space, octree, body_from_config(config), bp.start, bp.goal, config.goal_tolerance)
        result = get_planner(planner)(problem, budget, params or PlannerParams(), np.random.default_rng(seed))
        wall = time.perf_counter() - t0
        status = classify_status(result, problem)
        raw = norm = smooth = None
        if result.path is not None:
            dense = interpolate_path(result.path, config.interpolation_parameter, space)
            raw = path_length(dense, space)
            norm = normalize_length(raw, bp.ground_truth_length)
            smooth = path_smoothness(dense)
        return RunRecord(planner, bp.id, repeat, status, raw, norm, smooth, wall, result.iterations,
                         result.samples_generated, seed)
    except Exception as exc:  # a crashing run must not end the campaign
        log.exception("run %s/%d/%d failed", planner, bp.id, repeat)
        return RunRecord(planner, bp.id, repeat, Status.FAILURE, None, None, None, time.perf_counter() - t0, 0, 0,
                         seed, error=f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# CSV


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Status):
        return v.value
    return str(v)


def write_results(records: list[RunRecord], path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([_fmt(v) for v in (r.planner, r.problem_id, r.repeat, r.status, r.raw_length,
                                          r.normalized_length, r.smoothness, r.wall_time, r.iterations, r.samples,
                                          r.seed)])


def read_results(path: str | os.PathLike) -> list[RunRecord]:
    opt = lambda s: float(s) if s != "" else None  # noqa: E731
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        for row in reader:
            out.append(RunRecord(
                planner=row["planner"], problem_id=int(row["problem_id"]), repeat=int(row["repeat"]),
                status=Status(row["status"]), raw_length=opt(row["raw_length_m"]),
                normalized_length=opt(row["normalized_length"]), smoothness=opt(row["smoothness_rad"]),
                wall_time=float(row["wall_time_s"]), iterations=int(row["iterations"]), samples=int(row["samples"]),
                seed=int(row["seed"]),
            ))
    return out


# ---------------------------------------------------------------------------


def summarize(records: list[RunRecord]) -> dict:
    """Per planner: run count, exact rate, medians of normalized length and smoothness over exact runs."""
    out = {}
    for name in dict.fromkeys(r.planner for r in records):
        rows = [r for r in records if r.planner == name]
        exact = [r for r in rows if r.status is Status.EXACT]
        out[name] = {
            "runs": len(rows),
            "exact_rate": len(exact) / len(rows),
            "approximate_rate": sum(r.status is Status.APPROXIMATE for r in rows) / len(rows),
            "median_normalized_length": statistics.median([r.normalized_length for r in exact]) if exact else None,
            "median_smoothness": statistics.median([r.smoothness for r in exact]) if exact else None,
            "errors": sum(bool(r.error) for r in rows),
        }
    return out


def format_summary(summary: dict) -> str:
    lines = [f"{'planner':<16} {'runs':>5} {'exact%':>7} {'med.len':>9} {'med.smooth':>11}"]
    for name, s in summary.items():
        ml = "-" if s["median_normalized_length"] is None else f"{s['median_normalized_length']:.2f}"
        ms = "-" if s["median_smoothness"] is None else f"{s['median_smoothness']:.3f}"
        lines.append(f"{name:<16} {s['runs']:>5} {100 * s['exact_rate']:>6.1f}% {ml:>9} {ms:>11}")
    return "\n".join(lines)


def memory_mb() -> float:
    import psutil

    return psutil.Process().memory_info().rss / 2**20


@dataclass
class CampaignResult:
    records: list[RunRecord]
    results_path: str
    summary: dict
    aborted: str = ""
    problems: list = field(default_factory=list)


def run_benchmark(config: BenchmarkConfig, out_dir: str | os.PathLike = ".", iterations_mode: bool = False,
                  problems: list[BenchProblem] | None = None, octree: OccupancyOctree | None = None,
                  progress=None) -> CampaignResult:
    """Run the full campaign and write the CSV, a JSON summary and a metadata file into ``out_dir``."""
    from .. import warmup

    warmup()
    os.makedirs(out_dir, exist_ok=True)
    octree = octree if octree is not None else load_octree(config)
    space = space_from_config(config)
    if problems is None:
        problems = generate_problems(config, octree, space, iterations_mode=iterations_mode)
    budget = planner_budget(config, iterations_mode)
    records: list[RunRecord] = []
    aborted = ""
    for bp in problems:
        for planner in config.selected_planners:
            for rep in range(config.batch_size):
                if not aborted and memory_mb() > config.max_memory:
                    aborted = f"memory watermark {config.max_memory} MB exceeded"
                    log.error("%s; remaining runs are recorded as failures", aborted)
                if aborted:
                    records.append(RunRecord(planner, bp.id, rep, Status.FAILURE, None, None, None, 0.0, 0, 0,
                                             run_seed(config.master_seed, planner, bp.id, rep), error=aborted))
                    continue
                rec = run_once(planner, bp, config, space, octree, budget, rep)
                records.append(rec)
                if progress is not None:
                    progress(rec)

    results_path = os.path.join(out_dir, os.path.basename(config.results_output_file) or "result.log")
    write_results(records, results_path)
    summary = summarize(records)
    with open(results_path + ".summary.json", "w", encoding="utf-8") as fh:
        json.dump({"planners": summary, "aborted": aborted}, fh, indent=2)
    meta = {
        "state_space": config.selected_state_space.value,
        "budget": budget.mode.value,
        "budget_amount": budget.amount,
        "master_seed": config.master_seed,
        "epochs": len(problems),
        "batch_size": config.batch_size,
        "planners": list(config.selected_planners),
        "interpolation_parameter": config.interpolation_parameter,
        "metrics_path": "interpolated",
        "ground_truth_lengths": [bp.ground_truth_length for bp in problems],
        "min_start_goal_distance": config.min_euclidean_dist_start_to_goal,
        "problem_separation": [
            float(np.linalg.norm(space.position(bp.goal) - space.position(bp.start))) for bp in problems
        ],
    }
    with open(results_path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
    return CampaignResult(records, results_path, summary, aborted, problems)


__all__ = [
    "CSV_COLUMNS",
    "CampaignResult",
    "format_summary",
    "load_octree",
    "read_results",
    "run_benchmark",
    "run_once",
    "run_seed",
    "summarize",
    "write_results",
]
