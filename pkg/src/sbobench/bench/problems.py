"""Random feasible planning problems with ground-truth reference paths."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from ..collision import CollisionChecker, RobotBody
from ..planners import Budget, Path, PlannerParams, Problem, Status, plan_rrt, plan_rrt_star
from ..planners.common import path_cost
from ..statespace import SpaceKind, StateSpace
from ..worldmap import OccupancyOctree
from .config import BenchmarkConfig

MAX_POSE_DRAWS = 10_000
MAX_PLAN_FAILURES = 20
_PROBLEM_STREAM = 0x50524F42  # distinguishes problem streams from run streams


class ProblemGenerationError(RuntimeError):
    """No acceptable problem could be produced; ``stage`` is 'pose', 'precheck' or 'ground_truth'."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass(eq=False)
class BenchProblem:
    id: int
    start: np.ndarray
    goal: np.ndarray
    ground_truth_path: Path
    ground_truth_length: float

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "start": [float(v) for v in self.start],
            "goal": [float(v) for v in self.goal],
            "ground_truth_length": float(self.ground_truth_length),
            "ground_truth_path": self.ground_truth_path.states.tolist(),
            "kind": self.ground_truth_path.kind.value,
        }

    @classmethod
    def from_json(cls, d: dict) -> "BenchProblem":
        return cls(
            id=int(d["id"]),
            start=np.array(d["start"], dtype=float),
            goal=np.array(d["goal"], dtype=float),
            ground_truth_path=Path(np.array(d["ground_truth_path"], dtype=float), SpaceKind(d["kind"])),
            ground_truth_length=float(d["ground_truth_length"]),
        )


def space_from_config(config: BenchmarkConfig, kind: SpaceKind | None = None) -> StateSpace:
    return StateSpace(kind or config.selected_state_space, config.bounds, config.min_turning_radius)


def body_from_config(config: BenchmarkConfig) -> RobotBody:
    return RobotBody(tuple(config.robot_body_dimens))


def problem_rng(master_seed: int, problem_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, _PROBLEM_STREAM, problem_id]))


def generate_problem(config: BenchmarkConfig, octree: OccupancyOctree, space: StateSpace,
                     rng: np.random.Generator, problem_id: int = 0, iterations_mode: bool = False,
                     ground_truth: bool = True) -> BenchProblem:
    """Draw a valid, reachable start/goal pair and compute its ground-truth path.

    Poses are rejection-sampled until both are valid and far enough apart.
    A plain RRT must then find an exact solution, after which RRT* with the
    long ground-truth budget provides the reference path. Pairs failing either
    search are discarded and redrawn.
    """
    body = body_from_config(config)
    checker = CollisionChecker(space, body, octree)
    pose_draws = 0
    failures = {"precheck": 0, "ground_truth": 0}
    if iterations_mode:
        pre_budget = Budget.iterations(config.precheck_iterations)
        gt_budget = Budget.iterations(config.ground_truth_iterations)
    else:
        pre_budget = Budget.wall_clock(config.precheck_timeout)
        gt_budget = Budget.wall_clock(config.ground_truth_timeout)
    params = PlannerParams()
    while True:
        start = goal = None
        while start is None:
            if pose_draws >= MAX_POSE_DRAWS:
                raise ProblemGenerationError("pose", f"no valid start/goal pair after {MAX_POSE_DRAWS} pose draws")
            pose_draws += 1
            s = space.sample_uniform(rng)
            if not checker.is_state_valid(s):
                continue
            g = space.sample_uniform(rng)
            if not checker.is_state_valid(g):
                continue
            gap = float(np.linalg.norm(space.position(s) - space.position(g)))
            if gap < config.min_euclidean_dist_start_to_goal:
                continue
            start, goal = s, g
        problem = Problem(space, octree, body, start, goal, config.goal_tolerance)
        pre = plan_rrt(problem, pre_budget, params, rng)
        if pre.status is not Status.EXACT:
            failures["precheck"] += 1
            if failures["precheck"] >= MAX_PLAN_FAILURES:
                raise ProblemGenerationError("precheck", f"{MAX_PLAN_FAILURES} start/goal pairs failed the precheck")
            continue
        if not ground_truth:
            return BenchProblem(problem_id, start, goal, pre.path, path_cost(space, pre.path.states))
        gt = plan_rrt_star(problem, gt_budget, params, rng)
        if gt.status is not Status.EXACT:
            failures["ground_truth"] += 1
            if failures["ground_truth"] >= MAX_PLAN_FAILURES:
                raise ProblemGenerationError("ground_truth",
                                             f"{MAX_PLAN_FAILURES} start/goal pairs failed the ground-truth search")
            continue
        length = path_cost(space, gt.path.states)
        if not length > 0 or not math.isfinite(length):
            continue
        return BenchProblem(problem_id, start, goal, gt.path, length)


def generate_problems(config: BenchmarkConfig, octree: OccupancyOctree, space: StateSpace | None = None,
                      count: int | None = None, iterations_mode: bool = False, progress=None) -> list[BenchProblem]:
    space = space or space_from_config(config)
    out = []
    for pid in range(config.epochs if count is None else count):
        out.append(generate_problem(config, octree, space, problem_rng(config.master_seed, pid), pid, iterations_mode))
        if progress is not None:
            progress(pid, out[-1])
    return out


def save_problems(problems: list[BenchProblem], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([p.to_json() for p in problems], fh)


def load_problems(path: str | os.PathLike) -> list[BenchProblem]:
    with open(path, encoding="utf-8") as fh:
        return [BenchProblem.from_json(d) for d in json.load(fh)]
