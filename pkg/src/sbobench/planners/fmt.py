"""Fast marching tree (FMT*) over one batch of samples."""

from __future__ import annotations

import heapq
import math

import numpy as np

from .base import Budget, Path, PlannerParams, PlannerResult, Problem, Status, record_improvement
from .common import NearestIndex, rewiring_radius, rrt_star_gamma

_UNVISITED, _OPEN, _CLOSED, _OPEN_NEW = 0, 1, 2, 3


def plan_fmt_star(problem: Problem, budget: Budget, params: PlannerParams | None = None,
                  rng: np.random.Generator | None = None) -> PlannerResult:
    """Single-shot FMT*.

    Draws ``params.num_samples`` valid states, then marches a tree outward from
    the start in order of cost-to-come. Each unvisited neighbor of the expanded
    node is joined to its cheapest open neighbor, with only that one motion
    checked. Reaching the goal region ends the search; running out of open
    nodes or budget ends it with Failure.
    """
    params = params or PlannerParams()
    rng = rng if rng is not None else np.random.default_rng()
    checker = problem.checker()
    problem.validate(checker)
    space = problem.space
    clock = budget.start()

    states = [problem.start, problem.goal]
    drawn = 0
    while len(states) < params.num_samples + 2 and not clock.time_up():
        s = space.sample_uniform(rng)
        drawn += 1
        if checker.is_state_valid(s):
            states.append(s)
    index = NearestIndex(space, capacity=len(states))
    index.add_many(np.asarray(states))
    n = len(index)
    dim = space.measure()[0]
    radius = rewiring_radius(n, dim, rrt_star_gamma(space), math.inf)

    out_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    in_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def out_nbrs(i):
        if i not in out_cache:
            idx, d = index.within(index.states[i], radius, "from")
            keep = idx != i
            out_cache[i] = (idx[keep], d[keep])
        return out_cache[i]

    def in_nbrs(i):
        if space.symmetric:
            return out_nbrs(i)
        if i not in in_cache:
            idx, d = index.within(index.states[i], radius, "to")
            keep = idx != i
            in_cache[i] = (idx[keep], d[keep])
        return in_cache[i]

    status = np.zeros(n, dtype=np.int8)
    cost = np.full(n, math.inf)
    parent = np.full(n, -1, dtype=np.int64)
    status[0] = _OPEN
    cost[0] = 0.0
    heap = [(0.0, 0)]
    reached = -1
    expansions = 0
    while heap and not clock.time_up():
        if budget.is_iterations and expansions >= budget.amount:
            break
        c, z = heapq.heappop(heap)
        if status[z] != _OPEN or c != cost[z]:
            continue
        if problem.reaches_goal(index.states[z]):
            reached = z
            break
        expansions += 1
        clock.tick()
        fresh = []
        x_idx, _ = out_nbrs(z)
        for x in x_idx[status[x_idx] == _UNVISITED].tolist():
            y_idx, y_d = in_nbrs(x)
            mask = status[y_idx] == _OPEN
            if not mask.any():
                continue
            cand = cost[y_idx[mask]] + y_d[mask]
            k = int(np.argmin(cand))
            y = int(y_idx[mask][k])
            # FMT* checks only one motion per node, so it certifies every edge it keeps
            if checker.is_motion_certified(index.states[y], index.states[x]):
                cost[x] = float(cand[k])
                parent[x] = y
                status[x] = _OPEN_NEW
                fresh.append(x)
        for x in fresh:
            status[x] = _OPEN
            heapq.heappush(heap, (cost[x], x))
        status[z] = _CLOSED

    trace: list = []
    path = None
    result_status = Status.FAILURE
    if reached >= 0:
        chain = [reached]
        while chain[-1] != 0:
            chain.append(int(parent[chain[-1]]))
        chain = chain[::-1]
        if len(chain) == 1:
            chain = [0, 0]
        path = Path(index.states[chain].copy(), space.kind)
        result_status = Status.EXACT
        record_improvement(trace, clock.stamp(), float(cost[reached]))
    return PlannerResult(
        status=result_status, path=path, cost_trace=trace, iterations=expansions, samples_generated=drawn,
        motion_checks=checker.motion_checks, planner="FMTstar", elapsed=clock.elapsed(),
    )
