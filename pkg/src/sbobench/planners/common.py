"""Connection radii, informed sampling and the nearest-neighbor index."""

from __future__ import annotations

import math

import numpy as np

from ..statespace import SpaceKind, StateSpace
from .gridindex import GridIndex

DEFAULT_ETA = 5.0


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def rrt_star_gamma(space: StateSpace) -> float:
    """gamma = 2 (1 + 1/d)^(1/d) (mu / zeta_d)^(1/d), with mu the bounds volume of ``space``."""
    d, mu = space.measure()
    return 2.0 * (1.0 + 1.0 / d) ** (1.0 / d) * (mu / unit_ball_volume(d)) ** (1.0 / d)


def rewiring_radius(n: int, d: int, gamma: float, eta: float = DEFAULT_ETA) -> float:
    """min(gamma (ln n / n)^(1/d), eta)."""
    if n < 2:
        raise ValueError("rewiring radius needs n >= 2")
    return min(gamma * (math.log(n) / n) ** (1.0 / d), eta)


def prm_star_k(n: int, d: int) -> int:
    """ceil(e (1 + 1/d) ln n) nearest neighbors."""
    if n < 2:
        raise ValueError("prm_star_k needs n >= 2")
    return int(math.ceil(math.e * (1.0 + 1.0 / d) * math.log(n)))


# ---------------------------------------------------------------------------
# informed sampling


def _rotation_to_world(axis: np.ndarray) -> np.ndarray:
    """Orthonormal matrix whose first column is ``axis``."""
    dim = axis.shape[0]
    if dim == 2:
        return np.array([[axis[0], -axis[1]], [axis[1], axis[0]]])
    m = np.eye(dim)
    m[:, 0] = axis
    # Gram-Schmidt starting from the axis; pick the identity columns least aligned with it
    order = np.argsort(np.abs(axis))
    basis = [axis]
    for i in order:
        v = np.eye(dim)[i]
        for b in basis:
            v = v - (v @ b) * b
        nv = np.linalg.norm(v)
        if nv > 1e-9:
            basis.append(v / nv)
        if len(basis) == dim:
            break
    return np.stack(basis, axis=1)


def _positions_in_bounds(space: StateSpace, p: np.ndarray) -> bool:
    b = space.bounds
    if not (b.minx <= p[0] <= b.maxx and b.miny <= p[1] <= b.maxy):
        return False
    return space.kind is not SpaceKind.SE3 or b.minz <= p[2] <= b.maxz


def informed_sample(start, goal, c_best: float, space: StateSpace, rng: np.random.Generator,
                    max_tries: int = 100000) -> np.ndarray:
    """Uniform sample from the states whose position could lie on a path cheaper than ``c_best``.

    The positional part is drawn uniformly from the prolate hyperspheroid with
    foci at the start and goal positions (intersected with the bounds); the
    orientation is drawn uniformly.
    """
    if math.isinf(c_best):
        return space.sample_uniform(rng)
    pa = space.position(np.asarray(start, dtype=float))
    pb = space.position(np.asarray(goal, dtype=float))
    c_min = float(np.linalg.norm(pb - pa))
    if c_best < c_min - 1e-12:
        raise ValueError(f"c_best {c_best} below the start-goal distance {c_min}")
    c_best = max(c_best, c_min)
    dim = pa.shape[0]
    r1 = c_best / 2
    r2 = math.sqrt(max(c_best * c_best - c_min * c_min, 0.0)) / 2
    center = (pa + pb) / 2
    b = space.bounds
    box = np.array([b.maxx - b.minx, b.maxy - b.miny] + ([b.maxz - b.minz] if dim == 3 else []))
    ellipsoid_measure = unit_ball_volume(dim) * r1 * r2 ** (dim - 1)

    for _ in range(max_tries):
        if ellipsoid_measure < np.prod(box[box > 0]) or r2 == 0:
            axis = (pb - pa) / c_min if c_min > 0 else np.eye(dim)[0]
            rot = _rotation_to_world(axis)
            x = rng.standard_normal(dim)
            x *= rng.random() ** (1.0 / dim) / np.linalg.norm(x)
            p = center + rot @ (np.array([r1] + [r2] * (dim - 1)) * x)
            if not _positions_in_bounds(space, p):
                continue
        else:
            s = space.sample_uniform(rng)
            p = space.position(s)
            if np.linalg.norm(p - pa) + np.linalg.norm(p - pb) > c_best:
                continue
        orient = space.sample_orientation(rng)
        return np.concatenate([p, orient])
    raise RuntimeError("informed sampling failed to hit the bounds")


def path_lower_bound(space: StateSpace, start, goal, s) -> float:
    """||start - s|| + ||s - goal|| over positions: a lower bound on any path cost through ``s``."""
    p = space.position(s)
    return float(np.linalg.norm(p - space.position(start)) + np.linalg.norm(p - space.position(goal)))


# ---------------------------------------------------------------------------
# nearest neighbors


class NearestIndex:
    """Incremental nearest-neighbor index over states of one space.

    States are bucketed in a uniform grid over their positions that refines
    itself as the set grows. Every metric here dominates positional distance,
    so both radius and k-nearest queries are exact under the space metric.
    Ties are broken by insertion index so results are deterministic.
    """

    def __init__(self, space: StateSpace, capacity: int = 1024):
        self.space = space
        self._grid = GridIndex(space, capacity)

    def __len__(self) -> int:
        return self._grid.n

    @property
    def states(self) -> np.ndarray:
        return self._grid.states

    def add(self, state) -> int:
        return self._grid.add(state)

    def add_many(self, states: np.ndarray) -> None:
        for s in states:
            self._grid.add(s)

    @staticmethod
    def _forward(direction: str) -> bool:
        if direction not in ("to", "from"):
            raise ValueError(f"direction must be 'to' or 'from', got {direction!r}")
        return direction == "from"  # "from": d(q -> node), "to": d(node -> q)

    def within(self, q, r: float, direction: str = "to") -> tuple[np.ndarray, np.ndarray]:
        """Indices and exact distances of states within metric distance ``r`` of ``q``, sorted."""
        fwd = self._forward(direction)
        if self._grid.n == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0)
        idx, d = self._grid.within(q, r, fwd)
        if idx.size > 1:
            order = np.lexsort((idx, d))
            idx, d = idx[order], d[order]
        return idx, d

    def k_nearest(self, q, k: int, direction: str = "to") -> tuple[np.ndarray, np.ndarray]:
        fwd = self._forward(direction)
        if self._grid.n == 0 or k <= 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0)
        return self._grid.knn(q, min(k, self._grid.n), fwd)

    def nearest(self, q, direction: str = "to") -> tuple[int, float]:
        idx, d = self.k_nearest(q, 1, direction)
        return int(idx[0]), float(d[0])


def segment_costs(space: StateSpace, states: np.ndarray) -> np.ndarray:
    """distance(s_i, s_i+1) for consecutive states."""
    states = np.asarray(states, dtype=float)
    if space.kind is SpaceKind.SE2:
        d = np.diff(states, axis=0)
        dyaw = np.abs((d[:, 2] + math.pi) % (2 * math.pi) - math.pi)
        return np.hypot(d[:, 0], d[:, 1]) + space.yaw_weight * dyaw
    return np.array([space.distance(states[i], states[i + 1]) for i in range(len(states) - 1)])


def path_cost(space: StateSpace, states: np.ndarray) -> float:
    return float(np.sum(segment_costs(space, states))) if len(states) > 1 else 0.0
