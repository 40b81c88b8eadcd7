"""Compact binary serialization of :class:`OccupancyOctree`.

Layout (little-endian)::

    magic      4 bytes  b"SBOM"
    version    u16
    resolution f64
    origin     3 x f64
    depth      u8
    node_count u64
    payload    ceil(2 * node_count / 8) bytes

The payload is the pre-order traversal of the tree, two bits per node packed
least-significant first: 0 free leaf, 1 occupied leaf, 2 internal node.
"""

from __future__ import annotations

import os
import struct

import numpy as np
from numba import njit

from .octree import FREE, INTERNAL, MAX_DEPTH, OCCUPIED, OccupancyOctree

MAGIC = b"SBOM"
VERSION = 1
_HEADER = struct.Struct("<4sHd3dBQ")


class MapFormatError(ValueError):
    """Base class for unreadable map files."""


class MapHeaderError(MapFormatError):
    """Missing or wrong magic bytes, or a header too short to parse."""


class MapVersionError(MapFormatError):
    """The file was written with an unsupported format version."""


class MapTruncatedError(MapFormatError):
    """The node payload ends before the tree is complete."""


@njit(cache=True)
def _bfs_to_preorder(status, child, depth):
    n = status.shape[0]
    out = np.empty(n, dtype=np.uint8)
    stack = np.empty(8 * (depth + 1) + 1, dtype=np.int64)
    stack[0] = 0
    top = 1
    m = 0
    while top > 0:
        top -= 1
        node = stack[top]
        out[m] = status[node]
        m += 1
        if status[node] == INTERNAL:
            for c in range(7, -1, -1):
                stack[top] = child[node] + c
                top += 1
    return out


@njit(cache=True)
def _preorder_to_bfs(pre):
    """Returns (status, child, error) where error is 0 ok, 1 truncated, 2 trailing or bad code."""
    n = pre.shape[0]
    kids = np.full((n, 8), -1, dtype=np.int64)
    st_node = np.empty(n + 1, dtype=np.int64)
    st_seen = np.empty(n + 1, dtype=np.int64)
    top = 0
    done = False
    for i in range(n):
        if done or pre[i] > INTERNAL:
            return np.empty(0, np.uint8), np.empty(0, np.int64), 2
        if top > 0:
            p = st_node[top - 1]
            kids[p, st_seen[top - 1]] = i
            st_seen[top - 1] += 1
            if st_seen[top - 1] == 8:
                top -= 1
        if pre[i] == INTERNAL:
            st_node[top] = i
            st_seen[top] = 0
            top += 1
        if top == 0:
            done = True
    if not done:
        return np.empty(0, np.uint8), np.empty(0, np.int64), 1
    status = np.empty(n, dtype=np.uint8)
    child = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    queue[0] = 0
    head = 0
    tail = 1
    while head < tail:
        old = queue[head]
        status[head] = pre[old]
        if pre[old] == INTERNAL:
            child[head] = tail
            for c in range(8):
                queue[tail] = kids[old, c]
                tail += 1
        head += 1
    return status, child, 0


def encode_map(octree: OccupancyOctree) -> bytes:
    pre = _bfs_to_preorder(octree.status, octree.child, octree.depth)
    n = len(pre)
    padded = np.zeros(((n + 3) // 4) * 4, dtype=np.uint8)
    padded[:n] = pre
    quads = padded.reshape(-1, 4)
    packed = quads[:, 0] | (quads[:, 1] << 2) | (quads[:, 2] << 4) | (quads[:, 3] << 6)
    header = _HEADER.pack(MAGIC, VERSION, octree.resolution, *map(float, octree.origin), octree.depth, n)
    return header + packed.astype(np.uint8).tobytes()


def decode_map(data: bytes) -> OccupancyOctree:
    if len(data) < _HEADER.size:
        if data[:4] != MAGIC[: len(data[:4])] or len(data) < 4:
            raise MapHeaderError("not a map file: bad magic")
        raise MapTruncatedError("map header is truncated")
    magic, version, res, ox, oy, oz, depth, n = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise MapHeaderError("not a map file: bad magic")
    if version != VERSION:
        raise MapVersionError(f"unsupported map version {version} (expected {VERSION})")
    if not res > 0 or depth > MAX_DEPTH or n < 1:
        raise MapFormatError("invalid map header fields")
    need = (2 * n + 7) // 8
    payload = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
    if len(payload) < need:
        raise MapTruncatedError(f"map payload has {len(payload)} bytes, expected {need}")
    if len(payload) > need:
        raise MapFormatError("unexpected bytes after map payload")
    pre = np.stack([(payload >> s) & 3 for s in (0, 2, 4, 6)], axis=1).ravel()[:n].astype(np.uint8)
    status, child, err = _preorder_to_bfs(pre)
    if err == 1:
        raise MapTruncatedError("map payload ends before the tree is complete")
    if err:
        raise MapFormatError("malformed map payload")
    octree = OccupancyOctree(float(res), np.array([ox, oy, oz]), int(depth), status, child, 0)
    count = _count_occupied(status, child, int(depth))
    if count < 0:
        raise MapFormatError("map tree is deeper than its declared depth")
    object.__setattr__(octree, "occupied_count", count)
    return octree


def _count_occupied(status, child, depth) -> int:
    # level sizes follow from the BFS layout: walk level by level
    total = 0
    level = np.array([0])
    h = depth
    while len(level):
        st = status[level]
        total += int(np.count_nonzero(st == OCCUPIED)) * 8**h
        internal = level[st == INTERNAL]
        if len(internal) and h == 0:
            return -1
        level = (child[internal][:, None] + np.arange(8)).ravel()
        h -= 1
    return total


def save_map(octree: OccupancyOctree, path: str | os.PathLike) -> int:
    """Write the map and return the file size in bytes."""
    data = encode_map(octree)
    with open(path, "wb") as fh:
        fh.write(data)
    return len(data)


def load_map(path: str | os.PathLike) -> OccupancyOctree:
    with open(path, "rb") as fh:
        return decode_map(fh.read())
