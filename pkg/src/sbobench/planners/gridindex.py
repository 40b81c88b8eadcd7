"""Uniform-grid spatial hash with exact metric queries, compiled with numba.

Every state metric used here is bounded below by the Euclidean distance between
positions, so a query can stop scanning rings of grid cells as soon as the ring's
positional lower bound exceeds the current answer.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..statespace.spaces import kernel_distance


@njit(cache=True)
def _cell_coords(p, origin, cs, dims, pd):
    c = np.empty(3, dtype=np.int64)
    c[2] = 0
    for d in range(pd):
        v = int(math.floor((p[d] - origin[d]) / cs))
        if v < 0:
            v = 0
        if v >= dims[d]:
            v = dims[d] - 1
        c[d] = v
    return c


@njit(cache=True)
def _flat(c, dims):
    return (c[2] * dims[1] + c[1]) * dims[0] + c[0]


@njit(cache=True)
def grid_insert(states, head, nxt, i, origin, cs, dims, pd):
    c = _cell_coords(states[i], origin, cs, dims, pd)
    f = _flat(c, dims)
    nxt[i] = head[f]
    head[f] = i


@njit(cache=True)
def grid_rebuild(states, n, head, nxt, origin, cs, dims, pd):
    head[:] = -1
    for i in range(n):
        grid_insert(states, head, nxt, i, origin, cs, dims, pd)


@njit(cache=True)
def _metric(kind, q, s, forward, yaw_weight, radius):
    # forward: d(q -> s); otherwise d(s -> q)
    if forward:
        return kernel_distance(kind, q, s, yaw_weight, radius)
    return kernel_distance(kind, s, q, yaw_weight, radius)


@njit(cache=True)
def grid_within(kind, states, head, nxt, origin, cs, dims, pd, q, r, forward, yaw_weight, radius):
    """Indices and distances of states within metric distance r (unsorted)."""
    lo = np.zeros(3, dtype=np.int64)
    hi = np.zeros(3, dtype=np.int64)
    for d in range(pd):
        a = int(math.floor((q[d] - r - origin[d]) / cs))
        b = int(math.floor((q[d] + r - origin[d]) / cs))
        lo[d] = min(max(a, 0), dims[d] - 1)
        hi[d] = min(max(b, 0), dims[d] - 1)
    cap = 64
    out_i = np.empty(cap, dtype=np.int64)
    out_d = np.empty(cap)
    m = 0
    r2 = r * r
    c = np.zeros(3, dtype=np.int64)
    for cz in range(lo[2], hi[2] + 1):
        c[2] = cz
        for cy in range(lo[1], hi[1] + 1):
            c[1] = cy
            for cx in range(lo[0], hi[0] + 1):
                c[0] = cx
                j = head[_flat(c, dims)]
                while j >= 0:
                    p2 = 0.0
                    for d in range(pd):
                        t = states[j, d] - q[d]
                        p2 += t * t
                    if p2 <= r2:
                        dist = _metric(kind, q, states[j], forward, yaw_weight, radius)
                        if dist <= r:
                            if m == cap:
                                cap *= 2
                                ni = np.empty(cap, dtype=np.int64)
                                nd = np.empty(cap)
                                ni[:m] = out_i[:m]
                                nd[:m] = out_d[:m]
                                out_i = ni
                                out_d = nd
                            out_i[m] = j
                            out_d[m] = dist
                            m += 1
                    j = nxt[j]
    return out_i[:m], out_d[:m]


@njit(cache=True)
def grid_knn(kind, states, head, nxt, origin, cs, dims, pd, q, k, forward, yaw_weight, radius):
    """Exact k nearest under the metric, sorted by (distance, index)."""
    best_i = np.full(k, -1, dtype=np.int64)
    best_d = np.full(k, np.inf)
    qc = _cell_coords(q, origin, cs, dims, pd)
    max_ring = 0
    for d in range(pd):
        max_ring = max(max_ring, qc[d], dims[d] - 1 - qc[d])
    c = np.zeros(3, dtype=np.int64)
    for ring in range(max_ring + 1):
        if ring >= 1 and (ring - 1) * cs > best_d[k - 1]:
            break
        lo0, hi0 = qc[0] - ring, qc[0] + ring
        lo1, hi1 = qc[1] - ring, qc[1] + ring
        lo2, hi2 = (qc[2] - ring, qc[2] + ring) if pd == 3 else (0, 0)
        for cz in range(max(lo2, 0), min(hi2, dims[2] - 1) + 1):
            for cy in range(max(lo1, 0), min(hi1, dims[1] - 1) + 1):
                for cx in range(max(lo0, 0), min(hi0, dims[0] - 1) + 1):
                    # only the shell of this ring
                    cheb = max(abs(cx - qc[0]), abs(cy - qc[1]))
                    if pd == 3:
                        cheb = max(cheb, abs(cz - qc[2]))
                    if cheb != ring:
                        continue
                    c[0] = cx
                    c[1] = cy
                    c[2] = cz
                    j = head[_flat(c, dims)]
                    while j >= 0:
                        p2 = 0.0
                        for d in range(pd):
                            t = states[j, d] - q[d]
                            p2 += t * t
                        if p2 <= best_d[k - 1] * best_d[k - 1]:
                            dist = _metric(kind, q, states[j], forward, yaw_weight, radius)
                            if dist < best_d[k - 1] or (dist == best_d[k - 1] and j < best_i[k - 1]):
                                # insertion into the sorted top-k list
                                pos = k - 1
                                while pos > 0 and (best_d[pos - 1] > dist or (best_d[pos - 1] == dist
                                                                              and best_i[pos - 1] > j)):
                                    best_d[pos] = best_d[pos - 1]
                                    best_i[pos] = best_i[pos - 1]
                                    pos -= 1
                                best_d[pos] = dist
                                best_i[pos] = j
                        j = nxt[j]
    m = 0
    while m < k and best_i[m] >= 0:
        m += 1
    return best_i[:m], best_d[:m]


class GridIndex:
    """Incremental exact nearest-neighbor structure for states of one space."""

    TARGET_PER_CELL = 6
    MAX_CELLS = 1 << 22

    def __init__(self, space, capacity: int = 1024, cells_per_axis: int = 64):
        self.space = space
        self.kind = space.code
        self.pd = space.position_dim
        b = space.bounds
        lo = [b.minx, b.miny] + ([b.minz] if self.pd == 3 else [])
        hi = [b.maxx, b.maxy] + ([b.maxz] if self.pd == 3 else [])
        self.origin = np.zeros(3)
        self.origin[: self.pd] = lo
        self.extent = np.maximum(np.asarray(hi) - np.asarray(lo), 1e-9)
        self.states_buf = np.empty((capacity, space.state_dim))
        self.nxt = np.full(capacity, -1, dtype=np.int64)
        self.n = 0
        self._set_cell(float(self.extent.max()) / cells_per_axis)

    def _set_cell(self, cs: float) -> None:
        self.cs = cs
        dims = np.ones(3, dtype=np.int64)
        dims[: self.pd] = np.maximum(1, np.ceil(self.extent / cs).astype(np.int64))
        self.dims = dims
        self.head = np.full(int(np.prod(dims)), -1, dtype=np.int64)
        grid_rebuild(self.states_buf, self.n, self.head, self.nxt, self.origin, self.cs, self.dims, self.pd)

    def add(self, state) -> int:
        if self.n == self.states_buf.shape[0]:
            cap = 2 * self.n
            sb = np.empty((cap, self.states_buf.shape[1]))
            sb[: self.n] = self.states_buf[: self.n]
            nx = np.full(cap, -1, dtype=np.int64)
            nx[: self.n] = self.nxt[: self.n]
            self.states_buf, self.nxt = sb, nx
        i = self.n
        self.states_buf[i] = state
        self.n += 1
        grid_insert(self.states_buf, self.head, self.nxt, i, self.origin, self.cs, self.dims, self.pd)
        if self.n > self.TARGET_PER_CELL * self.head.shape[0] and self.head.shape[0] * 2**self.pd <= self.MAX_CELLS:
            self._set_cell(self.cs / 2)
        return i

    @property
    def states(self) -> np.ndarray:
        return self.states_buf[: self.n]

    def within(self, q, r: float, forward: bool):
        return grid_within(self.kind, self.states_buf, self.head, self.nxt, self.origin, self.cs, self.dims, self.pd,
                           np.asarray(q, dtype=float), float(r), forward, self.space.yaw_weight,
                           self.space.min_turning_radius)

    def knn(self, q, k: int, forward: bool):
        return grid_knn(self.kind, self.states_buf, self.head, self.nxt, self.origin, self.cs, self.dims, self.pd,
                        np.asarray(q, dtype=float), int(k), forward, self.space.yaw_weight,
                        self.space.min_turning_radius)
