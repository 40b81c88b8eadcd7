"""Evaluation metrics over planner output: length, smoothness and status."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .planners.base import Path, PlannerResult, Problem, Status
from .planners.common import segment_costs
from .statespace import StateSpace


class StatusIntegrityError(AssertionError):
    """A planner reported a status its own path does not support."""


_COLLINEAR_EPS = 16 * np.finfo(float).eps


def path_length(path: Path | np.ndarray, space: StateSpace) -> float:
    """Sum of space distances between consecutive states (curve arclength for car spaces)."""
    states = path.states if isinstance(path, Path) else np.asarray(path, dtype=float)
    if len(states) < 2:
        raise ValueError("path length needs at least two states")
    return float(segment_costs(space, states).sum())


def path_smoothness(path: Path | np.ndarray, position_dim: int | None = None) -> float:
    """Sum of turning angles (each in [0, pi]) between successive positional segments.

    Only positions are used; zero-length segments are dropped first. A straight
    path scores exactly 0.
    """
    if isinstance(path, Path):
        states = path.states
        position_dim = position_dim or (3 if path.kind.value == "SE3" else 2)
    else:
        states = np.asarray(path, dtype=float)
        position_dim = position_dim or min(states.shape[1], 2)
    pts = states[:, :position_dim]
    seg = np.diff(pts, axis=0)
    seg = seg[np.any(seg != 0.0, axis=1)]
    if len(seg) < 2:
        return 0.0
    a, b = seg[:-1], seg[1:]
    # atan2(|a x b|, a.b) is exact for collinear segments and well conditioned near 0 and pi
    dot = np.sum(a * b, axis=1)
    if position_dim == 2:
        cross = np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    else:
        cross = np.linalg.norm(np.cross(a, b), axis=1)
    # vertices collinear up to the rounding of their coordinates count as straight
    scale = float(np.abs(pts).max())
    cross[cross <= _COLLINEAR_EPS * scale * (np.linalg.norm(a, axis=1) + np.linalg.norm(b, axis=1))] = 0.0
    return float(np.sum(np.arctan2(cross, dot)))


def derive_status(path: Path | None, problem: Problem) -> Status:
    if path is None:
        return Status.FAILURE
    return Status.EXACT if problem.reaches_goal(path.end) else Status.APPROXIMATE


def classify_status(result: PlannerResult, problem: Problem) -> Status:
    """Status from the path's terminal state; raises StatusIntegrityError on disagreement with the planner."""
    derived = derive_status(result.path, problem)
    if derived is not result.status:
        raise StatusIntegrityError(f"{result.planner} reported {result.status.value} but its path is {derived.value}")
    return derived


def normalize_length(raw: float, ground_truth: float) -> float:
    """Length scaled so the ground-truth length scores 100."""
    if not ground_truth > 0:
        raise ValueError("ground truth length must be positive")
    return 100.0 * raw / ground_truth


@dataclass
class RunRecord:
    planner: str
    problem_id: int
    repeat: int
    status: Status
    raw_length: float | None
    normalized_length: float | None
    smoothness: float | None
    wall_time: float
    iterations: int = 0
    samples: int = 0
    seed: int = 0
    error: str = field(default="", compare=False)

    def __post_init__(self):
        self.status = Status(self.status)
        if (self.raw_length is None) != (self.normalized_length is None):
            raise ValueError("normalized length must be present exactly when raw length is")
        if self.smoothness is not None and self.smoothness < 0:
            raise ValueError("smoothness must be non-negative")

    @property
    def has_path(self) -> bool:
        return self.raw_length is not None and not math.isnan(self.raw_length)
