"""Multi-worker planners: CForest (cooperating RRT* trees) and anytime path shortening."""

from __future__ import annotations

import math
import threading

import numpy as np

from .base import Budget, BudgetClock, Path, PlannerParams, PlannerResult, Problem, SharedBest, Status
from .common import segment_costs
from .rrtstar import TreeEngine
from .simplify import interpolate_path, shortcut_simplify


def _drive(engines, clock: BudgetClock, budget: Budget, after_step=None) -> None:
    """Advance all engines until the budget is spent.

    Iteration budgets count the total steps of all workers and run them in a
    fixed round-robin order on one thread, which keeps results reproducible.
    Wall-clock budgets give every worker its own thread.
    """
    if budget.is_iterations or len(engines) == 1:
        while not clock.exhausted():
            for i, e in enumerate(engines):
                if clock.exhausted():
                    break
                e.step()
                clock.tick()
                if after_step is not None:
                    after_step(i, e)
        return

    def work(i, e):
        while not clock.time_up():
            e.step()
            if after_step is not None:
                after_step(i, e)

    threads = [threading.Thread(target=work, args=(i, e), daemon=True) for i, e in enumerate(engines)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    clock.iterations = sum(e.iterations for e in engines)


def _finish(name, problem, shared, engines, clock) -> PlannerResult:
    cost, path, _, _ = shared.snapshot()
    iterations = sum(e.iterations for e in engines)
    samples = sum(e.samples for e in engines)
    checks = sum(e.checker.motion_checks for e in engines)
    if path is not None:
        status = Status.EXACT
    else:
        _, path = min((e.approximate() for e in engines), key=lambda gp: gp[0])
        status = Status.FAILURE if path is None else Status.APPROXIMATE
    return PlannerResult(
        status=status, path=path, cost_trace=list(shared.trace), iterations=iterations, samples_generated=samples,
        motion_checks=checks, planner=name, elapsed=clock.elapsed(),
    )


def plan_cforest(problem: Problem, budget: Budget, params: PlannerParams | None = None,
                 rng: np.random.Generator | None = None) -> PlannerResult:
    """``params.workers`` informed RRT* trees sharing one best-solution cell.

    Workers prune samples and new nodes against the shared cost, sample from
    the informed set it defines, and replay a better path published by another
    worker as their next samples.
    """
    params = params or PlannerParams()
    rng = rng if rng is not None else np.random.default_rng()
    checker = problem.checker()
    problem.validate(checker)
    clock = budget.start()
    shared = SharedBest()
    engines = [
        TreeEngine(problem, params, r, clock, problem.checker(), informed=True, prune=True, shared=shared,
                   worker_id=i)
        for i, r in enumerate(rng.spawn(params.workers))
    ]
    _drive(engines, clock, budget)
    return _finish("CForest", problem, shared, engines, clock)


def _post_process(path: Path, problem: Problem, params: PlannerParams, rng, checker) -> tuple[Path, float]:
    simplified = shortcut_simplify(path, problem, params.simplify_attempts, rng, checker)
    dense = interpolate_path(simplified, params.interpolation_count, problem.space)
    states = dense.states
    out = path  # the raw solution is already certified
    for candidate in (dense, simplified):
        s = candidate.states
        if all(checker.is_motion_certified(s[i], s[i + 1]) for i in range(len(s) - 1)):
            out = candidate
            break
    return out, float(segment_costs(problem.space, out.states).sum())


def plan_aps(problem: Problem, budget: Budget, params: PlannerParams | None = None,
             rng: np.random.Generator | None = None) -> PlannerResult:
    """Anytime path shortening over ``params.workers`` independent RRT* trees.

    Whenever a worker improves its own solution, that path is shortcut and
    re-sampled uniformly; the shortest post-processed path is kept. Paths of
    different workers are never spliced together.
    """
    params = params or PlannerParams()
    rng = rng if rng is not None else np.random.default_rng()
    checker = problem.checker()
    problem.validate(checker)
    clock = budget.start()
    shared = SharedBest()
    streams = rng.spawn(params.workers)
    engines = [TreeEngine(problem, params, streams[i], clock, problem.checker(), worker_id=i)
               for i in range(params.workers)]
    simplify_rngs = [s.spawn(1)[0] for s in streams]
    seen = [math.inf] * len(engines)

    def after_step(i, e):
        if e.best_cost < seen[i]:
            seen[i] = e.best_cost
            path, cost = _post_process(e.best_path, problem, params, simplify_rngs[i], e.checker)
            shared.offer(cost, path, i, clock.stamp())

    _drive(engines, clock, budget, after_step)
    result = _finish("APS", problem, shared, engines, clock)
    if result.status is not Status.EXACT:
        result.status, result.path = Status.FAILURE, None
    return result
