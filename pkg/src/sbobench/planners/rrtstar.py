"""RRT, RRT* and Informed RRT* built on one steppable tree engine."""

from __future__ import annotations

import math

import numpy as np

from ..collision import CollisionChecker
from ..statespace import SpaceKind
from .base import (
    Budget,
    BudgetClock,
    Path,
    PlannerParams,
    PlannerResult,
    Problem,
    SharedBest,
    Status,
    record_improvement,
)
from .common import NearestIndex, informed_sample, path_lower_bound, rewiring_radius, rrt_star_gamma


class TreeEngine:
    """One growing tree. Call :meth:`step` once per iteration.

    ``optimize=False`` gives plain RRT (no parent choice, no rewiring, stops
    at the first solution). ``informed`` draws samples from the informed set
    once a solution cost is known. ``prune`` rejects samples and new nodes
    whose positional lower bound cannot beat the best known cost. ``shared``
    couples the engine to an ensemble cell: its cost feeds informed sampling
    and pruning, and better paths found elsewhere are replayed as samples.

    Every solution is certified edge by edge at the oracle step before it is
    accepted. An edge that fails detaches the subtree below it (cost becomes
    infinite) until rewiring attaches those nodes again.
    """

    def __init__(self, problem: Problem, params: PlannerParams, rng: np.random.Generator, clock: BudgetClock,
                 checker: CollisionChecker | None = None, *, optimize: bool = True, informed: bool = False,
                 prune: bool = False, shared: SharedBest | None = None, worker_id: int = 0):
        self.problem = problem
        self.space = problem.space
        self.params = params
        self.rng = rng
        self.clock = clock
        self.checker = checker or problem.checker()
        self.optimize = optimize
        self.informed = informed
        self.prune = prune
        self.shared = shared
        self.worker_id = worker_id
        self.directed = not self.space.symmetric
        self.dim = self.space.measure()[0]
        self.gamma = rrt_star_gamma(self.space)

        self.index = NearestIndex(self.space)
        cap = 1024
        self.parent = np.full(cap, -1, dtype=np.int64)
        self.cost = np.zeros(cap)
        self.edge = np.zeros(cap)  # cost of the edge from the parent
        self.certified: set[tuple[int, int]] = set()
        self.children: list[list[int]] = []
        self.goal_nodes: list[int] = []
        self._goal_node_exact = -1
        self._add_node(problem.start, -1, 0.0, 0.0)
        if problem.reaches_goal(problem.start):
            self.goal_nodes.append(0)

        self.best_cost = math.inf
        self.best_node = -1
        self.best_path: Path | None = None
        self.trace: list = []
        self.samples = 0
        self.iterations = 0
        self.solved_first_at = None
        self._pending: list[np.ndarray] = []
        self._seen_version = 0
        self.sample_hook = None  # optional callable(sample, c_best) for instrumentation
        self._update_best()

    # --- tree bookkeeping ------------------------------------------------
    def _add_node(self, state, parent: int, cost: float, edge: float) -> int:
        i = self.index.add(state)
        if i >= self.parent.shape[0]:
            self.parent = np.concatenate([self.parent, np.full(self.parent.shape[0], -1, dtype=np.int64)])
            self.cost = np.concatenate([self.cost, np.zeros(self.cost.shape[0])])
            self.edge = np.concatenate([self.edge, np.zeros(self.edge.shape[0])])
        self.parent[i] = parent
        self.cost[i] = cost
        self.edge[i] = edge
        self.children.append([])
        if parent >= 0:
            self.children[parent].append(i)
        return i

    def _reparent(self, u: int, new_parent: int, new_cost: float, edge: float) -> None:
        old = self.parent[u]
        if old >= 0:
            self.children[old].remove(u)
        self.children[new_parent].append(u)
        self.parent[u] = new_parent
        self.edge[u] = edge
        self.cost[u] = new_cost
        stack = list(self.children[u])
        while stack:
            v = stack.pop()
            self.cost[v] = self.cost[self.parent[v]] + self.edge[v]
            stack.extend(self.children[v])

    def _detach(self, u: int) -> None:
        """Cut ``u`` from its parent; its whole subtree becomes unreachable."""
        self.children[self.parent[u]].remove(u)
        self.parent[u] = -1
        stack = [u]
        while stack:
            v = stack.pop()
            self.cost[v] = math.inf
            stack.extend(self.children[v])

    def _certify(self, node: int) -> bool:
        """Check the edges on the path to ``node`` at the oracle step, detaching at the first failure."""
        states = self.index.states
        v = node
        while self.parent[v] >= 0:
            u = int(self.parent[v])
            if (u, v) not in self.certified:
                if not self.checker.is_motion_certified(states[u], states[v]):
                    self._detach(v)
                    return False
                self.certified.add((u, v))
            v = u
        return v == 0

    @property
    def n_nodes(self) -> int:
        return len(self.index)

    def c_best(self) -> float:
        c = self.best_cost
        if self.shared is not None:
            c = min(c, self.shared.cost)
        return c

    @property
    def solved(self) -> bool:
        return self.best_node >= 0

    # --- one iteration -----------------------------------------------------
    def _draw(self) -> np.ndarray:
        if self._pending:
            return self._pending.pop()
        p = self.problem
        if self.rng.random() < self.params.goal_bias:
            return p.goal.copy()
        c = self.c_best()
        if self.informed and math.isfinite(c):
            s = informed_sample(p.start, p.goal, c, self.space, self.rng)
        else:
            s = self.space.sample_uniform(self.rng)
        if self.sample_hook is not None:
            self.sample_hook(s, c)
        return s

    def _absorb_shared(self) -> None:
        if self.shared is None or self.shared.version == self._seen_version:
            return
        cost, path, owner, version = self.shared.snapshot()
        self._seen_version = version
        if owner != self.worker_id and path is not None and cost < self.best_cost:
            # replay the other worker's path as upcoming samples, start side first
            self._pending = [s.copy() for s in path.states[::-1]]

    def step(self) -> None:
        self.iterations += 1
        self._absorb_shared()
        p = self.problem
        x_rand = self._draw()
        self.samples += 1
        c_best = self.c_best()
        if self.prune and math.isfinite(c_best) and path_lower_bound(self.space, p.start, p.goal, x_rand) >= c_best:
            return
        near_i, d_near = self.index.nearest(x_rand, "to")
        if d_near <= 0.0:
            return
        x_near = self.index.states[near_i]
        x_new, d_new = self.space.steer(x_near, x_rand, self.params.max_edge)
        x_new = np.array(x_new, dtype=float)
        is_goal_state = np.array_equal(x_new, p.goal)
        if is_goal_state and self._goal_node_exact >= 0:
            return
        if not self.checker.is_motion_valid(x_near, x_new):
            return

        parent, cost_new, edge_new = near_i, self.cost[near_i] + d_new, d_new
        near_idx = np.zeros(0, dtype=np.int64)
        if self.optimize:
            r = rewiring_radius(self.n_nodes + 1, self.dim, self.gamma, self.params.eta)
            near_idx, near_d = self.index.within(x_new, r, "to")
            if near_idx.size:
                cand_cost = self.cost[near_idx] + near_d
                order = np.lexsort((near_idx, cand_cost))
                for k in order:
                    v = int(near_idx[k])
                    if cand_cost[k] >= cost_new:
                        break
                    if self.checker.is_motion_valid(self.index.states[v], x_new):
                        parent, cost_new, edge_new = v, float(cand_cost[k]), float(near_d[k])
                        break

        if self.prune and math.isfinite(c_best):
            pos_to_goal = float(np.linalg.norm(self.space.position(x_new) - self.space.position(p.goal)))
            if cost_new + pos_to_goal >= c_best:
                return

        new = self._add_node(x_new, parent, cost_new, edge_new)
        gap = p.goal_distance(x_new)
        if gap <= p.goal_tolerance:
            self.goal_nodes.append(new)
            if is_goal_state:
                self._goal_node_exact = new

        if self.optimize and math.isfinite(cost_new):  # a node below a detached subtree cannot improve others
            if self.directed:
                r = rewiring_radius(self.n_nodes, self.dim, self.gamma, self.params.eta)
                out_idx, out_d = self.index.within(x_new, r, "from")
            else:
                out_idx, out_d = near_idx, near_d if near_idx.size else np.zeros(0)
            if out_idx.size:
                gain = self.cost[out_idx] - (cost_new + out_d)
                for k in np.flatnonzero(gain > 1e-12):
                    u = int(out_idx[k])
                    if u == parent or u == new:
                        continue
                    cand = cost_new + float(out_d[k])
                    if cand < self.cost[u] - 1e-12 and self.checker.is_motion_valid(x_new, self.index.states[u]):
                        self._reparent(u, new, cand, float(out_d[k]))
        self._update_best()

    def _update_best(self) -> None:
        while self.goal_nodes:
            costs = self.cost[self.goal_nodes]
            k = int(np.argmin(costs))
            c = float(costs[k])
            if not c < self.best_cost:
                return
            node = self.goal_nodes[k]
            if not self._certify(node):
                continue
            self.best_cost = c
            self.best_node = node
            self.best_path = self.path_to(node)
            if self.solved_first_at is None:
                self.solved_first_at = self.iterations
            record_improvement(self.trace, self.clock.stamp(), c)
            if self.shared is not None:
                self.shared.offer(c, self.best_path, self.worker_id, self.clock.stamp())
            return

    # --- results -----------------------------------------------------------
    def path_to(self, node: int) -> Path:
        chain = []
        v = node
        while v >= 0:
            chain.append(v)
            v = int(self.parent[v])
        states = self.index.states[chain[::-1]]
        if len(states) == 1:
            states = np.vstack([states, states])
        return Path(states.copy(), self.space.kind)

    def approximate(self) -> tuple[float, Path | None]:
        """Certified path to the attached node nearest the goal (other than the start)."""
        n = self.n_nodes
        if n < 2:
            return math.inf, None
        gaps = self.space.distances_to(self.index.states[1:n], self.problem.goal)
        gaps[~np.isfinite(self.cost[1:n])] = math.inf
        for k in np.argsort(gaps, kind="stable"):
            if not math.isfinite(gaps[k]):
                break
            node = int(k) + 1
            if math.isfinite(self.cost[node]) and self._certify(node):
                return float(gaps[k]), self.path_to(node)
        return math.inf, None

    def result(self, name: str) -> PlannerResult:
        if self.solved:
            status, path = Status.EXACT, self.best_path
        else:
            path = self.approximate()[1]
            status = Status.FAILURE if path is None else Status.APPROXIMATE
        return PlannerResult(
            status=status, path=path, cost_trace=list(self.trace), iterations=self.iterations,
            samples_generated=self.samples, motion_checks=self.checker.motion_checks, planner=name,
            elapsed=self.clock.elapsed(),
        )


def _run(problem, budget, params, rng, name, **engine_kw) -> PlannerResult:
    params = params or PlannerParams()
    rng = rng if rng is not None else np.random.default_rng()
    checker = problem.checker()
    problem.validate(checker)
    clock = budget.start()
    engine = TreeEngine(problem, params, rng, clock, checker, **engine_kw)
    stop_at_first = not engine_kw.get("optimize", True)
    while not clock.exhausted():
        if stop_at_first and engine.solved:
            break
        engine.step()
        clock.tick()
    return engine.result(name)


def plan_rrt(problem: Problem, budget: Budget, params: PlannerParams | None = None,
             rng: np.random.Generator | None = None) -> PlannerResult:
    """Non-optimizing RRT that stops at its first exact solution (feasibility checks)."""
    return _run(problem, budget, params, rng, "RRT", optimize=False)


def plan_rrt_star(problem: Problem, budget: Budget, params: PlannerParams | None = None,
                  rng: np.random.Generator | None = None) -> PlannerResult:
    return _run(problem, budget, params, rng, "RRTstar")


def plan_informed_rrt_star(problem: Problem, budget: Budget, params: PlannerParams | None = None,
                           rng: np.random.Generator | None = None) -> PlannerResult:
    return _run(problem, budget, params, rng, "InformedRRTstar", informed=True)


__all__ = ["TreeEngine", "plan_informed_rrt_star", "plan_rrt", "plan_rrt_star", "SpaceKind"]
