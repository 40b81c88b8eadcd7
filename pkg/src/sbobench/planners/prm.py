"""PRM* and LazyPRM* roadmaps."""

from __future__ import annotations

import heapq
import math

import numpy as np

from .base import Budget, BudgetClock, Path, PlannerParams, PlannerResult, Problem, Status, record_improvement
from .common import NearestIndex, prm_star_k

START, GOAL = 0, 1
CERTIFIED = 2  # edge flag; distinct from True, which equals 1


class _DisjointSet:
    def __init__(self):
        self.parent: list[int] = []

    def add(self) -> None:
        self.parent.append(len(self.parent))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


class Roadmap:
    """Graph over an incremental state index. ``out[u][v]`` is the edge cost u -> v.

    Edge validity is tracked per directed edge: CERTIFIED (passed the oracle
    step too), True (checked valid) or None (not checked yet, lazy mode only).
    Invalid edges are deleted.
    """

    def __init__(self, problem: Problem, checker, lazy: bool):
        self.problem = problem
        self.space = problem.space
        self.checker = checker
        self.lazy = lazy
        self.directed = not self.space.symmetric
        self.dim = self.space.measure()[0]
        self.index = NearestIndex(self.space)
        self.out: list[dict[int, float]] = []
        self.valid: list[dict[int, bool | int | None]] = []
        self.components = _DisjointSet()
        self._goal_pos = self.space.position(problem.goal)

    def __len__(self) -> int:
        return len(self.index)

    def _try_edge(self, u: int, v: int, cost: float) -> None:
        if self.lazy:
            flag = None
        else:
            if not self.checker.is_motion_valid(self.index.states[u], self.index.states[v]):
                return
            flag = True
        self.out[u][v] = cost
        self.valid[u][v] = flag
        if not self.directed:
            self.out[v][u] = cost
            self.valid[v][u] = flag
        self.components.union(u, v)

    def add_vertex(self, state) -> int:
        n = len(self)
        if n >= 1:
            k = min(n, prm_star_k(max(n + 1, 2), self.dim))
            in_idx, in_d = self.index.k_nearest(state, k, "to")
            if self.directed:
                out_idx, out_d = self.index.k_nearest(state, k, "from")
        v = self.index.add(state)
        self.out.append({})
        self.valid.append({})
        self.components.add()
        if n >= 1:
            for u, d in zip(in_idx.tolist(), in_d.tolist()):
                self._try_edge(u, v, d)
            if self.directed:
                for u, d in zip(out_idx.tolist(), out_d.tolist()):
                    self._try_edge(v, u, d)
        return v

    def connected(self) -> bool:
        return self.components.find(START) == self.components.find(GOAL)

    def remove_edge(self, u: int, v: int) -> None:
        self.out[u].pop(v, None)
        self.valid[u].pop(v, None)
        if not self.directed:
            self.out[v].pop(u, None)
            self.valid[v].pop(u, None)

    def astar(self) -> list[int] | None:
        states = self.index.states
        pd = self.space.position_dim
        goal = self._goal_pos
        h = lambda i: math.dist(states[i, :pd], goal)  # noqa: E731
        g = {START: 0.0}
        came = {}
        heap = [(h(START), 0.0, START)]
        closed = set()
        while heap:
            f, gu, u = heapq.heappop(heap)
            if u in closed:
                continue
            if u == GOAL:
                chain = [GOAL]
                while chain[-1] != START:
                    chain.append(came[chain[-1]])
                return chain[::-1]
            closed.add(u)
            for v, w in self.out[u].items():
                gv = gu + w
                if gv < g.get(v, math.inf):
                    g[v] = gv
                    came[v] = u
                    heapq.heappush(heap, (gv + h(v), gv, v))
        return None

    def shortest_valid_path(self, clock: BudgetClock | None = None) -> list[int] | None:
        """A* on the roadmap, confirming the edges of each candidate path.

        Unchecked edges (lazy mode) get the working-step check, and every edge
        is then certified at the oracle step. Failing edges are deleted and
        the search repeats until a candidate survives. A wall-clock ``clock``
        that runs out stops the search with no result; edge verdicts found so
        far are kept for the next search.
        """
        while True:
            if clock is not None and clock.time_up():
                return None
            chain = self.astar()
            if chain is None:
                return None
            ok = True
            for u, v in zip(chain[:-1], chain[1:]):
                flag = self.valid[u][v]
                if flag == CERTIFIED:
                    continue
                if self.checker.is_motion_certified(self.index.states[u], self.index.states[v], checked=flag is True):
                    self.valid[u][v] = CERTIFIED
                    if not self.directed:
                        self.valid[v][u] = CERTIFIED
                else:
                    self.remove_edge(u, v)
                    ok = False
                    break
            if ok:
                return chain

    def chain_cost(self, chain: list[int]) -> float:
        return float(sum(self.out[u][v] for u, v in zip(chain[:-1], chain[1:])))


def _plan(problem: Problem, budget: Budget, params, rng, lazy: bool) -> PlannerResult:
    params = params or PlannerParams()
    rng = rng if rng is not None else np.random.default_rng()
    checker = problem.checker()
    problem.validate(checker)
    clock = budget.start()
    graph = Roadmap(problem, checker, lazy)
    graph.add_vertex(problem.start)
    graph.add_vertex(problem.goal)
    trace: list = []
    best_chain: list[int] | None = None
    best_cost = math.inf
    samples = 0
    next_search = 2

    def search():
        nonlocal best_chain, best_cost
        chain = graph.shortest_valid_path(clock)
        if chain is not None:
            c = graph.chain_cost(chain)
            if c < best_cost:
                best_cost, best_chain = c, chain
                record_improvement(trace, clock.stamp(), c)

    while not clock.exhausted():
        clock.tick()
        s = problem.space.sample_uniform(rng)
        samples += 1
        if not checker.is_state_valid(s):
            continue
        graph.add_vertex(s)
        if len(graph) >= next_search and graph.connected():
            search()
            next_search = int(math.ceil(len(graph) * 1.1)) + 1
    if graph.connected():
        search()

    if best_chain is not None:
        states = graph.index.states[best_chain].copy()
        path, status = Path(states, problem.space.kind), Status.EXACT
    else:
        path, status = None, Status.FAILURE
    return PlannerResult(
        status=status, path=path, cost_trace=trace, iterations=clock.iterations, samples_generated=samples,
        motion_checks=checker.motion_checks, planner="LazyPRMstar" if lazy else "PRMstar", elapsed=clock.elapsed(),
    )


def plan_prm_star(problem: Problem, budget: Budget, params: PlannerParams | None = None,
                  rng: np.random.Generator | None = None) -> PlannerResult:
    """Roadmap with eager edge checks; anytime answers via A* once start and goal connect."""
    return _plan(problem, budget, params, rng, lazy=False)


def plan_lazy_prm_star(problem: Problem, budget: Budget, params: PlannerParams | None = None,
                       rng: np.random.Generator | None = None) -> PlannerResult:
    """Roadmap whose edges are checked only when they lie on a candidate shortest path."""
    return _plan(problem, budget, params, rng, lazy=True)
