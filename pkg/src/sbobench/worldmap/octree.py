"""Binary occupancy octree over an axis-aligned voxel lattice.

Nodes are stored breadth-first in two flat arrays: ``status`` (free leaf,
occupied leaf or internal) and ``child`` (index of the first of eight
contiguous children, -1 for leaves). A subtree whose voxels are all occupied
is collapsed into one occupied leaf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

FREE = 0
OCCUPIED = 1
INTERNAL = 2

MAX_DEPTH = 20


# ---------------------------------------------------------------------------
# Morton codes


def _spread_bits(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint64) & np.uint64(0x1FFFFF)
    v = (v | (v << np.uint64(32))) & np.uint64(0x1F00000000FFFF)
    v = (v | (v << np.uint64(16))) & np.uint64(0x1F0000FF0000FF)
    v = (v | (v << np.uint64(8))) & np.uint64(0x100F00F00F00F00F)
    v = (v | (v << np.uint64(4))) & np.uint64(0x10C30C30C30C30C3)
    v = (v | (v << np.uint64(2))) & np.uint64(0x1249249249249249)
    return v


def morton_encode(ijk: np.ndarray) -> np.ndarray:
    ijk = np.asarray(ijk, dtype=np.int64).reshape(-1, 3)
    return _spread_bits(ijk[:, 0]) | (_spread_bits(ijk[:, 1]) << np.uint64(1)) | (_spread_bits(ijk[:, 2]) << np.uint64(2))


# ---------------------------------------------------------------------------
# numba kernels


@njit(cache=True)
def box_overlaps_cube(cmin, size, center, rot, half):
    """Separating-axis test between the closed cube [cmin, cmin+size] and an oriented box.

    ``rot`` columns are the box axes in world coordinates. Touching counts as overlap.
    """
    h = 0.5 * size
    t0 = center[0] - (cmin[0] + h)
    t1 = center[1] - (cmin[1] + h)
    t2 = center[2] - (cmin[2] + h)
    e0, e1, e2 = half[0], half[1], half[2]
    eps = 1e-12
    r = rot
    a00 = abs(r[0, 0]) + eps
    a01 = abs(r[0, 1]) + eps
    a02 = abs(r[0, 2]) + eps
    a10 = abs(r[1, 0]) + eps
    a11 = abs(r[1, 1]) + eps
    a12 = abs(r[1, 2]) + eps
    a20 = abs(r[2, 0]) + eps
    a21 = abs(r[2, 1]) + eps
    a22 = abs(r[2, 2]) + eps
    # cube face axes
    if abs(t0) > h + e0 * a00 + e1 * a01 + e2 * a02:
        return False
    if abs(t1) > h + e0 * a10 + e1 * a11 + e2 * a12:
        return False
    if abs(t2) > h + e0 * a20 + e1 * a21 + e2 * a22:
        return False
    # box face axes
    if abs(t0 * r[0, 0] + t1 * r[1, 0] + t2 * r[2, 0]) > h * (a00 + a10 + a20) + e0:
        return False
    if abs(t0 * r[0, 1] + t1 * r[1, 1] + t2 * r[2, 1]) > h * (a01 + a11 + a21) + e1:
        return False
    if abs(t0 * r[0, 2] + t1 * r[1, 2] + t2 * r[2, 2]) > h * (a02 + a12 + a22) + e2:
        return False
    # edge cross products
    if abs(t2 * r[1, 0] - t1 * r[2, 0]) > h * (a20 + a10) + e1 * a02 + e2 * a01:
        return False
    if abs(t2 * r[1, 1] - t1 * r[2, 1]) > h * (a21 + a11) + e0 * a02 + e2 * a00:
        return False
    if abs(t2 * r[1, 2] - t1 * r[2, 2]) > h * (a22 + a12) + e0 * a01 + e1 * a00:
        return False
    if abs(t0 * r[2, 0] - t2 * r[0, 0]) > h * (a20 + a00) + e1 * a12 + e2 * a11:
        return False
    if abs(t0 * r[2, 1] - t2 * r[0, 1]) > h * (a21 + a01) + e0 * a12 + e2 * a10:
        return False
    if abs(t0 * r[2, 2] - t2 * r[0, 2]) > h * (a22 + a02) + e0 * a11 + e1 * a10:
        return False
    if abs(t1 * r[0, 0] - t0 * r[1, 0]) > h * (a10 + a00) + e1 * a22 + e2 * a21:
        return False
    if abs(t1 * r[0, 1] - t0 * r[1, 1]) > h * (a11 + a01) + e0 * a22 + e2 * a20:
        return False
    if abs(t1 * r[0, 2] - t0 * r[1, 2]) > h * (a12 + a02) + e0 * a21 + e1 * a20:
        return False
    return True


@njit(cache=True)
def octree_box_query(status, child, origin, res, depth, center, rot, half):
    """True iff an occupied leaf overlaps the oriented box."""
    if status[0] == FREE:
        return False
    # axis-aligned bound of the box, for pruning
    lo = np.empty(3)
    hi = np.empty(3)
    for i in range(3):
        ext = abs(rot[i, 0]) * half[0] + abs(rot[i, 1]) * half[1] + abs(rot[i, 2]) * half[2]
        lo[i] = center[i] - ext
        hi[i] = center[i] + ext
    cap = 8 * (depth + 1) + 1
    st_node = np.empty(cap, dtype=np.int64)
    st_i = np.empty(cap, dtype=np.int64)
    st_j = np.empty(cap, dtype=np.int64)
    st_k = np.empty(cap, dtype=np.int64)
    st_h = np.empty(cap, dtype=np.int64)
    top = 0
    st_node[0] = 0
    st_i[0] = 0
    st_j[0] = 0
    st_k[0] = 0
    st_h[0] = depth
    top = 1
    cmin = np.empty(3)
    while top > 0:
        top -= 1
        node = st_node[top]
        ci = st_i[top]
        cj = st_j[top]
        ck = st_k[top]
        hgt = st_h[top]
        n_vox = 1 << hgt
        size = n_vox * res
        cmin[0] = origin[0] + ci * res
        cmin[1] = origin[1] + cj * res
        cmin[2] = origin[2] + ck * res
        if (cmin[0] > hi[0] or cmin[0] + size < lo[0] or cmin[1] > hi[1] or cmin[1] + size < lo[1]
                or cmin[2] > hi[2] or cmin[2] + size < lo[2]):
            continue
        s = status[node]
        if s == OCCUPIED:
            if box_overlaps_cube(cmin, size, center, rot, half):
                return True
        elif s == INTERNAL:
            first = child[node]
            half_n = n_vox >> 1
            for c in range(8):
                cn = first + c
                if status[cn] == FREE:
                    continue
                st_node[top] = cn
                st_i[top] = ci + (c & 1) * half_n
                st_j[top] = cj + ((c >> 1) & 1) * half_n
                st_k[top] = ck + ((c >> 2) & 1) * half_n
                st_h[top] = hgt - 1
                top += 1
    return False


@njit(cache=True)
def octree_aabb_query(status, child, origin, res, depth, lo, hi):
    """True iff an occupied leaf touches the closed axis-aligned box [lo, hi]."""
    if status[0] == FREE:
        return False
    cap = 8 * (depth + 1) + 1
    st = np.empty((cap, 5), dtype=np.int64)
    st[0, 0] = 0
    st[0, 1] = 0
    st[0, 2] = 0
    st[0, 3] = 0
    st[0, 4] = depth
    top = 1
    while top > 0:
        top -= 1
        node, ci, cj, ck, hgt = st[top, 0], st[top, 1], st[top, 2], st[top, 3], st[top, 4]
        size = (1 << hgt) * res
        x0 = origin[0] + ci * res
        y0 = origin[1] + cj * res
        z0 = origin[2] + ck * res
        if x0 > hi[0] or x0 + size < lo[0] or y0 > hi[1] or y0 + size < lo[1] or z0 > hi[2] or z0 + size < lo[2]:
            continue
        s = status[node]
        if s == OCCUPIED:
            return True
        if s == INTERNAL:
            half_n = 1 << (hgt - 1)
            for c in range(8):
                cn = child[node] + c
                if status[cn] == FREE:
                    continue
                st[top, 0] = cn
                st[top, 1] = ci + (c & 1) * half_n
                st[top, 2] = cj + ((c >> 1) & 1) * half_n
                st[top, 3] = ck + ((c >> 2) & 1) * half_n
                st[top, 4] = hgt - 1
                top += 1
    return False


@njit(cache=True)
def _voxels_occupied(status, child, depth, ijk):
    out = np.zeros(ijk.shape[0], dtype=np.bool_)
    n_side = 1 << depth
    for q in range(ijk.shape[0]):
        i, j, k = ijk[q, 0], ijk[q, 1], ijk[q, 2]
        if i < 0 or j < 0 or k < 0 or i >= n_side or j >= n_side or k >= n_side:
            continue
        node = 0
        h = depth
        while status[node] == INTERNAL:
            h -= 1
            c = ((i >> h) & 1) | (((j >> h) & 1) << 1) | (((k >> h) & 1) << 2)
            node = child[node] + c
        out[q] = status[node] == OCCUPIED
    return out


@njit(cache=True)
def _occupied_leaves(status, child, depth):
    """(i, j, k, height) of every occupied leaf."""
    n = status.shape[0]
    out = np.empty((n, 4), dtype=np.int64)
    m = 0
    st = np.empty((8 * (depth + 1) + 1, 5), dtype=np.int64)
    st[0, 0] = 0
    st[0, 1] = 0
    st[0, 2] = 0
    st[0, 3] = 0
    st[0, 4] = depth
    top = 1
    while top > 0:
        top -= 1
        node, i, j, k, h = st[top, 0], st[top, 1], st[top, 2], st[top, 3], st[top, 4]
        if status[node] == OCCUPIED:
            out[m, 0] = i
            out[m, 1] = j
            out[m, 2] = k
            out[m, 3] = h
            m += 1
        elif status[node] == INTERNAL:
            half_n = 1 << (h - 1)
            for c in range(7, -1, -1):
                st[top, 0] = child[node] + c
                st[top, 1] = i + (c & 1) * half_n
                st[top, 2] = j + ((c >> 1) & 1) * half_n
                st[top, 3] = k + ((c >> 2) & 1) * half_n
                st[top, 4] = h - 1
                top += 1
    return out[:m]


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OrientedBox:
    center: np.ndarray
    rotation: np.ndarray  # columns are the box axes
    half_extents: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "rotation", np.ascontiguousarray(self.rotation, dtype=float))
        object.__setattr__(self, "half_extents", np.asarray(self.half_extents, dtype=float))
        if np.any(self.half_extents <= 0):
            raise ValueError("box extents must be positive")


@dataclass(frozen=True, eq=False)
class OccupancyOctree:
    resolution: float
    origin: np.ndarray
    depth: int
    status: np.ndarray = field(repr=False)
    child: np.ndarray = field(repr=False)
    occupied_count: int = 0

    @property
    def node_count(self) -> int:
        return int(self.status.shape[0])

    @property
    def side_voxels(self) -> int:
        return 1 << self.depth

    def contains(self, ijk) -> np.ndarray:
        """Occupancy of lattice voxels (vectorized)."""
        ijk = np.ascontiguousarray(np.asarray(ijk, dtype=np.int64).reshape(-1, 3))
        return _voxels_occupied(self.status, self.child, self.depth, ijk)

    def occupied_voxels(self) -> np.ndarray:
        """All occupied lattice coordinates as an (N, 3) int array (collapsed leaves expanded)."""
        leaves = _occupied_leaves(self.status, self.child, self.depth)
        blocks = []
        for i, j, k, h in leaves:
            n = 1 << int(h)
            if n == 1:
                blocks.append(np.array([[i, j, k]], dtype=np.int64))
            else:
                g = np.stack(np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"), -1).reshape(-1, 3)
                blocks.append(g + np.array([i, j, k]))
        if not blocks:
            return np.zeros((0, 3), dtype=np.int64)
        return np.concatenate(blocks)

    def voxel_center(self, ijk) -> np.ndarray:
        return self.origin + (np.asarray(ijk, dtype=float) + 0.5) * self.resolution

    def world_to_voxel(self, p) -> np.ndarray:
        return np.floor((np.asarray(p, dtype=float) - self.origin) / self.resolution).astype(np.int64)

    def max_occupied_z(self) -> float:
        leaves = _occupied_leaves(self.status, self.child, self.depth)
        if len(leaves) == 0:
            return -math.inf
        tops = leaves[:, 2] + (1 << leaves[:, 3])
        return float(self.origin[2] + tops.max() * self.resolution)

    def same_occupancy(self, other: "OccupancyOctree") -> bool:
        return (
            self.resolution == other.resolution
            and np.array_equal(self.origin, other.origin)
            and self.occupied_count == other.occupied_count
            and self.depth == other.depth
            and np.array_equal(self.status, other.status)
            and np.array_equal(self.child, other.child)
        )


def build_octree(voxels, resolution: float, origin=(0.0, 0.0, 0.0)) -> OccupancyOctree:
    """Octree whose occupied voxels are exactly ``voxels`` (non-negative lattice coordinates)."""
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    origin = np.asarray(origin, dtype=float).reshape(3)
    ijk = np.asarray(list(voxels) if isinstance(voxels, (set, frozenset)) else voxels, dtype=np.int64).reshape(-1, 3)
    if ijk.size and ijk.min() < 0:
        raise ValueError("voxel coordinates must be non-negative lattice indices")
    codes = np.unique(morton_encode(ijk)) if len(ijk) else np.zeros(0, dtype=np.uint64)
    max_coord = int(ijk.max()) if len(ijk) else 0
    depth = max(0, int(max_coord).bit_length())
    if depth > MAX_DEPTH:
        raise ValueError(f"lattice too large for octree depth {MAX_DEPTH}")

    statuses = []
    children = []
    prefixes = np.zeros(1, dtype=np.uint64)
    next_offset = 1
    for h in range(depth, -1, -1):
        shift = np.uint64(3 * h)
        lo = np.searchsorted(codes, prefixes << shift)
        hi = np.searchsorted(codes, (prefixes + np.uint64(1)) << shift)
        count = hi - lo
        st = np.where(count == 0, FREE, np.where(count == 8**h, OCCUPIED, INTERNAL)).astype(np.uint8)
        internal = np.flatnonzero(st == INTERNAL)
        ch = np.full(len(st), -1, dtype=np.int64)
        ch[internal] = next_offset + 8 * np.arange(len(internal))
        next_offset += 8 * len(internal)
        statuses.append(st)
        children.append(ch)
        prefixes = (prefixes[internal][:, None] * np.uint64(8) + np.arange(8, dtype=np.uint64)[None, :]).ravel()
        if len(prefixes) == 0:
            break
    return OccupancyOctree(
        resolution=float(resolution),
        origin=origin,
        depth=depth,
        status=np.concatenate(statuses),
        child=np.concatenate(children),
        occupied_count=int(len(codes)),
    )


def query_overlapping_voxels(octree: OccupancyOctree, box: OrientedBox) -> bool:
    """True iff any occupied voxel intersects the oriented box."""
    return bool(
        octree_box_query(
            octree.status, octree.child, octree.origin, octree.resolution, octree.depth,
            box.center, box.rotation, box.half_extents,
        )
    )
