"""Problem, budget, path and result types shared by every planner."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..collision import CollisionChecker, RobotBody
from ..statespace import SpaceKind, StateSpace
from ..worldmap import OccupancyOctree


class Status(str, Enum):
    EXACT = "Exact"
    APPROXIMATE = "Approximate"
    FAILURE = "Failure"


class InvalidProblemError(ValueError):
    """Start or goal state is out of bounds or in collision."""


class BudgetMode(str, Enum):
    WALL_CLOCK = "WallClock"
    ITERATIONS = "Iterations"


@dataclass(frozen=True)
class Budget:
    """Planning allowance: seconds of wall-clock time or a count of iterations."""

    mode: BudgetMode
    amount: float

    def __post_init__(self):
        object.__setattr__(self, "mode", BudgetMode(self.mode))
        if not self.amount > 0:
            raise ValueError("budget must be positive")
        if self.mode is BudgetMode.ITERATIONS:
            object.__setattr__(self, "amount", int(self.amount))

    @classmethod
    def wall_clock(cls, seconds: float) -> "Budget":
        return cls(BudgetMode.WALL_CLOCK, float(seconds))

    @classmethod
    def iterations(cls, count: int) -> "Budget":
        return cls(BudgetMode.ITERATIONS, int(count))

    @property
    def is_iterations(self) -> bool:
        return self.mode is BudgetMode.ITERATIONS

    def start(self) -> "BudgetClock":
        return BudgetClock(self)


class BudgetClock:
    """Tracks consumption of a budget. ``stamp()`` is the x-coordinate used in cost traces."""

    def __init__(self, budget: Budget):
        self.budget = budget
        self.t0 = time.perf_counter()
        self.iterations = 0

    def tick(self, n: int = 1) -> None:
        self.iterations += n

    def elapsed(self) -> float:
        return time.perf_counter() - self.t0

    def exhausted(self) -> bool:
        if self.budget.is_iterations:
            return self.iterations >= self.budget.amount
        return self.elapsed() >= self.budget.amount

    def time_up(self) -> bool:
        """Wall-clock limit only; iteration budgets never time out."""
        return not self.budget.is_iterations and self.elapsed() >= self.budget.amount

    def stamp(self) -> float:
        return float(self.iterations) if self.budget.is_iterations else self.elapsed()


@dataclass(eq=False)
class Path:
    """Ordered states of one space kind; consecutive states are joined by the space's local connection."""

    states: np.ndarray
    kind: SpaceKind

    def __post_init__(self):
        self.states = np.array(self.states, dtype=float, ndmin=2)
        if self.states.shape[0] < 2:
            raise ValueError("a path needs at least two states")
        self.kind = SpaceKind(self.kind)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def start(self) -> np.ndarray:
        return self.states[0]

    @property
    def end(self) -> np.ndarray:
        return self.states[-1]

    def copy(self) -> "Path":
        return Path(self.states.copy(), self.kind)


@dataclass(eq=False)
class Problem:
    space: StateSpace
    map: OccupancyOctree
    body: RobotBody
    start: np.ndarray
    goal: np.ndarray
    goal_tolerance: float = 0.2
    objective: str = "PathLength"
    motion_step: float | None = None

    def __post_init__(self):
        self.start = self.space.as_state(self.start).copy()
        self.goal = self.space.as_state(self.goal).copy()
        if not self.goal_tolerance > 0:
            raise ValueError("goal_tolerance must be positive")
        if self.objective != "PathLength":
            raise ValueError("only the PathLength objective is supported")

    def checker(self) -> CollisionChecker:
        """A fresh checker (own call counters) for one planner run."""
        return CollisionChecker(self.space, self.body, self.map, self.motion_step)

    def validate(self, checker: CollisionChecker | None = None) -> None:
        checker = checker or self.checker()
        if not checker.is_state_valid(self.start):
            raise InvalidProblemError("start state is invalid")
        if not checker.is_state_valid(self.goal):
            raise InvalidProblemError("goal state is invalid")

    def goal_distance(self, s) -> float:
        return self.space.distance(s, self.goal)

    def reaches_goal(self, s) -> bool:
        return self.goal_distance(s) <= self.goal_tolerance

    def positional_gap(self) -> float:
        return float(np.linalg.norm(self.space.position(self.goal) - self.space.position(self.start)))


@dataclass(eq=False)
class PlannerResult:
    status: Status
    path: Path | None
    cost_trace: list = field(default_factory=list)
    iterations: int = 0
    samples_generated: int = 0
    motion_checks: int = 0
    planner: str = ""
    elapsed: float = 0.0

    @property
    def cost(self) -> float:
        return self.cost_trace[-1][1] if self.cost_trace else math.inf


def record_improvement(trace: list, stamp: float, cost: float) -> bool:
    """Append (stamp, cost) when it strictly improves on the last entry."""
    if trace and cost >= trace[-1][1]:
        return False
    trace.append((float(stamp), float(cost)))
    return True


@dataclass(frozen=True)
class PlannerParams:
    """Tuning knobs shared by the planners; each planner reads the fields it needs."""

    max_edge: float = 2.5
    goal_bias: float = 0.05
    eta: float = 5.0
    num_samples: int = 2000
    workers: int = 8
    simplify_attempts: int = 100
    interpolation_count: int = 120

    def __post_init__(self):
        if not self.max_edge > 0:
            raise ValueError("max_edge must be positive")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError("goal_bias must be in [0, 1]")
        if self.num_samples < 2:
            raise ValueError("num_samples must be at least 2")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


class SharedBest:
    """Best-solution cell shared by ensemble workers; replace-if-better under a lock."""

    def __init__(self):
        import threading

        self._lock = threading.Lock()
        self.cost = math.inf
        self.path: Path | None = None
        self.owner = -1
        self.version = 0
        self.trace: list = []

    def offer(self, cost: float, path: Path, owner: int, stamp: float) -> bool:
        with self._lock:
            if not cost < self.cost:
                return False
            self.cost = cost
            self.path = path
            self.owner = owner
            self.version += 1
            self.trace.append((float(stamp), float(cost)))
            return True

    def snapshot(self) -> tuple[float, Path | None, int, int]:
        with self._lock:
            return self.cost, self.path, self.owner, self.version
