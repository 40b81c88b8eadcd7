"""Seeded procedural scenes: a ground surface plus box and cylinder obstacles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
from scipy import ndimage

from ..statespace import Bounds
from .octree import OccupancyOctree, build_octree


class SceneGenerationError(RuntimeError):
    """Raised when no obstacle placement leaves a traversable corridor."""


@dataclass(frozen=True)
class FlatGround:
    pass


@dataclass(frozen=True)
class HeightField:
    """Ground surface h(x, y) = amplitude * (1 + sin(2 pi x / L) sin(2 pi y / L)) / 2, in [0, amplitude]."""

    amplitude: float
    wavelength: float

    def __post_init__(self):
        if self.amplitude < 0 or self.wavelength <= 0:
            raise ValueError("height field needs amplitude >= 0 and wavelength > 0")

    def height(self, x, y):
        k = 2.0 * math.pi / self.wavelength
        return 0.5 * self.amplitude * (1.0 + np.sin(k * np.asarray(x)) * np.sin(k * np.asarray(y)))


Ground = Union[FlatGround, HeightField]


@dataclass(frozen=True)
class BoxObstacle:
    """Axis-aligned box given by its center and full side lengths."""

    center: tuple[float, float, float]
    extents: tuple[float, float, float]


@dataclass(frozen=True)
class CylinderObstacle:
    """Vertical cylinder standing on z = 0; ``center`` is its (x, y) axis position."""

    center: tuple[float, float]
    radius: float
    height: float


Obstacle = Union[BoxObstacle, CylinderObstacle]


@dataclass(frozen=True)
class SceneSpec:
    ground: Ground = field(default_factory=FlatGround)
    obstacles: tuple = ()
    extent: Bounds = field(default_factory=Bounds)
    seed: int = 0
    resolution: float = 0.2
    corridor_width: float = 1.5
    max_retries: int = 50
    jitter: float = 2.0
    ground_layers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if self.ground_layers < 1:
            raise ValueError("ground needs at least one voxel layer")
        if isinstance(self.ground, HeightField) and self.ground.amplitude >= self.extent.maxz:
            raise ValueError("height field amplitude must stay below the upper z bound")


# ---------------------------------------------------------------------------
# rasterization


def _index_range(lo, hi, origin, res, n):
    a = max(0, int(math.floor((lo - origin) / res - 0.5)))
    b = min(n, int(math.ceil((hi - origin) / res + 0.5)))
    return a, b


def _rasterize_obstacle(ob, origin, res, shape):
    """Voxel indices whose centers lie inside the obstacle."""
    nx, ny, nz = shape
    if isinstance(ob, BoxObstacle):
        c = np.asarray(ob.center, float)
        h = np.asarray(ob.extents, float) / 2
        lo, hi = c - h, c + h
    else:
        lo = np.array([ob.center[0] - ob.radius, ob.center[1] - ob.radius, 0.0])
        hi = np.array([ob.center[0] + ob.radius, ob.center[1] + ob.radius, ob.height])
    rng_ = [_index_range(lo[d], hi[d], origin[d], res, shape[d]) for d in range(3)]
    if any(a >= b for a, b in rng_):
        return np.zeros((0, 3), dtype=np.int64)
    axes = [np.arange(a, b) for a, b in rng_]
    ci, cj, ck = np.meshgrid(*axes, indexing="ij")
    cx = origin[0] + (ci + 0.5) * res
    cy = origin[1] + (cj + 0.5) * res
    cz = origin[2] + (ck + 0.5) * res
    if isinstance(ob, BoxObstacle):
        mask = (cx >= lo[0]) & (cx <= hi[0]) & (cy >= lo[1]) & (cy <= hi[1]) & (cz >= lo[2]) & (cz <= hi[2])
    else:
        mask = ((cx - ob.center[0]) ** 2 + (cy - ob.center[1]) ** 2 <= ob.radius**2) & (cz >= 0.0) & (cz <= ob.height)
    return np.stack([ci[mask], cj[mask], ck[mask]], axis=1).astype(np.int64)


def _ground_voxels(ground, origin, res, nx, ny, layers):
    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    i = i.ravel()
    j = j.ravel()
    base = [np.stack([i, j, np.full_like(i, k)], axis=1) for k in range(layers)]
    if isinstance(ground, HeightField) and ground.amplitude > 0:
        h = ground.height(origin[0] + (i + 0.5) * res, origin[1] + (j + 0.5) * res)
        # a voxel above the base layers is solid when its bottom face lies below the surface
        n_up = np.ceil(h / res - 1e-9).astype(np.int64)
        for k in range(int(n_up.max())):
            sel = n_up > k
            base.append(np.stack([i[sel], j[sel], np.full(sel.sum(), layers + k)], axis=1))
    return np.concatenate(base)


def _scene_top(spec: SceneSpec) -> float:
    top = spec.extent.maxz
    if isinstance(spec.ground, HeightField):
        top = max(top, spec.ground.amplitude)
    for ob in spec.obstacles:
        top = max(top, ob.center[2] + ob.extents[2] / 2 if isinstance(ob, BoxObstacle) else ob.height)
    return top


def _footprint_blocked(obstacles, ext: Bounds, cell: float):
    nx = int(math.ceil((ext.maxx - ext.minx) / cell))
    ny = int(math.ceil((ext.maxy - ext.miny) / cell))
    blocked = np.zeros((nx, ny), dtype=bool)
    for ob in obstacles:
        if isinstance(ob, BoxObstacle):
            lo = (ob.center[0] - ob.extents[0] / 2, ob.center[1] - ob.extents[1] / 2)
            hi = (ob.center[0] + ob.extents[0] / 2, ob.center[1] + ob.extents[1] / 2)
            if ob.center[2] - ob.extents[2] / 2 > ext.maxz:
                continue
        else:
            lo = (ob.center[0] - ob.radius, ob.center[1] - ob.radius)
            hi = (ob.center[0] + ob.radius, ob.center[1] + ob.radius)
        # conservative: any cell touched by the footprint's bounding rectangle
        a = max(0, int(math.floor((lo[0] - ext.minx) / cell)))
        b = min(nx, int(math.floor((hi[0] - ext.minx) / cell)) + 1)
        c = max(0, int(math.floor((lo[1] - ext.miny) / cell)))
        d = min(ny, int(math.floor((hi[1] - ext.miny) / cell)) + 1)
        if a < b and c < d:
            blocked[a:b, c:d] = True
    return blocked


def corridor_exists(obstacles, ext: Bounds, width: float, cell: float = 0.5) -> bool:
    """Coarse flood-fill check for a path of the given width from x = minx to x = maxx."""
    blocked = _footprint_blocked(obstacles, ext, cell)
    r = int(math.ceil((width / 2) / cell))
    if r > 0:
        blocked = ndimage.binary_dilation(blocked, structure=np.ones((2 * r + 1, 2 * r + 1), bool))
    # the robot center must also stay a half-width away from the y borders
    blocked[:, :r] = True
    blocked[:, blocked.shape[1] - r :] = True
    labels, _ = ndimage.label(~blocked, structure=np.ones((3, 3), bool))
    left = set(np.unique(labels[0])) - {0}
    right = set(np.unique(labels[-1])) - {0}
    return bool(left & right)


def _jitter(obstacles, rng, amount):
    out = []
    for ob in obstacles:
        dx, dy = rng.uniform(-amount, amount, 2)
        if isinstance(ob, BoxObstacle):
            out.append(replace(ob, center=(ob.center[0] + dx, ob.center[1] + dy, ob.center[2])))
        else:
            out.append(replace(ob, center=(ob.center[0] + dx, ob.center[1] + dy)))
    return tuple(out)


def voxelize_scene(spec: SceneSpec, obstacles=None) -> OccupancyOctree:
    """Rasterize ground and obstacles without any corridor check."""
    obstacles = spec.obstacles if obstacles is None else obstacles
    ext, res = spec.extent, spec.resolution
    origin = np.array([ext.minx, ext.miny, -spec.ground_layers * res])
    nx = int(math.ceil((ext.maxx - ext.minx) / res))
    ny = int(math.ceil((ext.maxy - ext.miny) / res))
    nz = int(math.ceil((_scene_top(spec) - origin[2]) / res)) + 1
    parts = [_ground_voxels(spec.ground, origin, res, nx, ny, spec.ground_layers)]
    for ob in obstacles:
        parts.append(_rasterize_obstacle(ob, origin, res, (nx, ny, nz)))
    return build_octree(np.concatenate(parts), res, origin)


def generate_scene(spec: SceneSpec) -> OccupancyOctree:
    """Deterministic octree for ``spec``.

    When the obstacles block every corridor of ``corridor_width`` between the
    x extremes, placements are jittered (seeded by ``spec.seed``) and retried
    up to ``max_retries`` times before giving up with SceneGenerationError.
    """
    rng = np.random.default_rng(spec.seed)
    obstacles = spec.obstacles
    for attempt in range(spec.max_retries + 1):
        if corridor_exists(obstacles, spec.extent, spec.corridor_width):
            return voxelize_scene(spec, obstacles)
        obstacles = _jitter(spec.obstacles, rng, spec.jitter * (1 + attempt))
    raise SceneGenerationError(f"no corridor of width {spec.corridor_width} m after {spec.max_retries} retries")


def random_scene_spec(
    seed: int,
    extent: Bounds | None = None,
    houses: int = 48,
    posts: int = 60,
    plants: int = 120,
    ground: Ground | None = None,
    resolution: float = 0.2,
) -> SceneSpec:
    """Cluttered stand-in world: box houses, thin tall lamp posts, short round plants."""
    extent = extent or Bounds()
    rng = np.random.default_rng(seed)
    obs: list = []

    def xy(margin):
        return (
            float(rng.uniform(extent.minx + margin, extent.maxx - margin)),
            float(rng.uniform(extent.miny + margin, extent.maxy - margin)),
        )

    for _ in range(houses):
        w, d, h = rng.uniform(6, 14), rng.uniform(6, 14), rng.uniform(3, 6)
        x, y = xy(2)
        obs.append(BoxObstacle((x, y, h / 2), (float(w), float(d), float(h))))
    for _ in range(posts):
        x, y = xy(1)
        obs.append(CylinderObstacle((x, y), float(rng.uniform(0.1, 0.25)), float(rng.uniform(3, 5))))
    for _ in range(plants):
        x, y = xy(1)
        obs.append(CylinderObstacle((x, y), float(rng.uniform(0.4, 1.5)), float(rng.uniform(0.5, 2.5))))
    return SceneSpec(
        ground=ground or FlatGround(), obstacles=tuple(obs), extent=extent, seed=seed, resolution=resolution
    )
