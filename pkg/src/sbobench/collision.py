"""Boolean validity of robot states and local motions against an occupancy octree.

The robot is a box. Planar states (SE2, Dubins, Reeds-Shepp) place the box at a
fixed height above the lower z bound and rotate it by yaw only; SE3 states use
their full position and quaternion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .statespace.spaces import StateSpace, SpaceKind, kernel_distance, kernel_in_bounds, kernel_interpolate
from .worldmap.octree import OccupancyOctree, octree_aabb_query, octree_box_query


@dataclass(frozen=True)
class RobotBody:
    """Box surrounding the robot, given by full side lengths in meters.

    ``clearance`` is the gap between the lower z bound and the bottom of the box
    for planar state spaces, so a vehicle standing on flat ground does not
    collide with the ground voxels it rests on.
    """

    extents: tuple[float, float, float] = (1.5, 1.5, 0.5)
    clearance: float = 0.1

    def __post_init__(self):
        ext = tuple(float(e) for e in self.extents)
        if len(ext) != 3 or min(ext) <= 0:
            raise ValueError("body extents must be three positive lengths")
        if self.clearance < 0:
            raise ValueError("clearance must be non-negative")
        object.__setattr__(self, "extents", ext)

    @property
    def half_extents(self) -> np.ndarray:
        return np.asarray(self.extents) / 2

    def planar_center_z(self, space: StateSpace) -> float:
        return space.bounds.minz + self.clearance + self.extents[2] / 2


def default_step(resolution: float) -> float:
    """Motion sampling step: half a voxel, capped at 10 cm."""
    return min(resolution / 2, 0.1)


def oracle_step(resolution: float) -> float:
    """Fine sampling step (a tenth of a voxel) used to certify planner output."""
    return resolution / 10


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True)
def body_pose(kind, s, z_body):
    """(center, rotation matrix) of the body box for state ``s``."""
    c = np.empty(3)
    rot = np.zeros((3, 3))
    if kind == 1:
        c[0] = s[0]
        c[1] = s[1]
        c[2] = s[2]
        w, x, y, z = s[3], s[4], s[5], s[6]
        n = math.sqrt(w * w + x * x + y * y + z * z)
        w, x, y, z = w / n, x / n, y / n, z / n
        rot[0, 0] = 1 - 2 * (y * y + z * z)
        rot[0, 1] = 2 * (x * y - w * z)
        rot[0, 2] = 2 * (x * z + w * y)
        rot[1, 0] = 2 * (x * y + w * z)
        rot[1, 1] = 1 - 2 * (x * x + z * z)
        rot[1, 2] = 2 * (y * z - w * x)
        rot[2, 0] = 2 * (x * z - w * y)
        rot[2, 1] = 2 * (y * z + w * x)
        rot[2, 2] = 1 - 2 * (x * x + y * y)
    else:
        c[0] = s[0]
        c[1] = s[1]
        c[2] = z_body
        cy = math.cos(s[2])
        sy = math.sin(s[2])
        rot[0, 0] = cy
        rot[0, 1] = -sy
        rot[1, 0] = sy
        rot[1, 1] = cy
        rot[2, 2] = 1.0
    return c, rot


@njit(cache=True)
def state_valid_kernel(kind, s, bnd, check_yaw, status, child, origin, res, depth, half, z_body):
    for v in s:
        if not math.isfinite(v):
            return False
    if not kernel_in_bounds(kind, s, bnd, check_yaw):
        return False
    c, rot = body_pose(kind, s, z_body)
    return not octree_box_query(status, child, origin, res, depth, c, rot, half)


@njit(cache=True)
def _bisection_order(n):
    """Indices 0..n, endpoints first then coarse-to-fine midpoints."""
    order = np.empty(n + 1, dtype=np.int64)
    seen = np.zeros(n + 1, dtype=np.bool_)
    m = 0
    order[m] = 0
    seen[0] = True
    m += 1
    if n > 0:
        order[m] = n
        seen[n] = True
        m += 1
    stride = n
    while m < n + 1:
        stride = max(1, stride // 2)
        for i in range(0, n + 1, stride):
            if not seen[i]:
                seen[i] = True
                order[m] = i
                m += 1
    return order


@njit(cache=True)
def motion_valid_kernel(kind, a, b, yaw_weight, radius, bnd, check_yaw, status, child, origin, res, depth, half,
                        z_body, step):
    d = kernel_distance(kind, a, b, yaw_weight, radius)
    if not math.isfinite(d):
        return False
    n = int(math.ceil(d / step))
    fr = np.empty(n + 1)
    for i in range(n + 1):
        fr[i] = i / n if n > 0 else 0.0
    pts = kernel_interpolate(kind, a, b, yaw_weight, radius, fr)
    # the interpolator lands on b up to rounding; use the exact endpoint
    pts[n, :] = b
    pts[0, :] = a
    # fast path: if nothing occupied touches the bound of every body pose, only bounds remain to check
    lo = np.empty(3)
    hi = np.empty(3)
    if kind == 1:
        reach = math.sqrt(half[0] * half[0] + half[1] * half[1] + half[2] * half[2])
        for d in range(3):
            lo[d] = pts[:, d].min() - reach
            hi[d] = pts[:, d].max() + reach
    else:
        reach = math.sqrt(half[0] * half[0] + half[1] * half[1])
        for d in range(2):
            lo[d] = pts[:, d].min() - reach
            hi[d] = pts[:, d].max() + reach
        lo[2] = z_body - half[2]
        hi[2] = z_body + half[2]
    if not octree_aabb_query(status, child, origin, res, depth, lo, hi):
        for i in range(n + 1):
            for v in pts[i]:
                if not math.isfinite(v):
                    return False
            if not kernel_in_bounds(kind, pts[i], bnd, check_yaw):
                return False
        return True
    order = _bisection_order(n)
    for idx in order:
        if not state_valid_kernel(kind, pts[idx], bnd, check_yaw, status, child, origin, res, depth, half, z_body):
            return False
    return True


# ---------------------------------------------------------------------------


@dataclass(eq=False)
class CollisionChecker:
    """Validity checks bound to one space, body and map, with call counters."""

    space: StateSpace
    body: RobotBody
    octree: OccupancyOctree
    step: float | None = None
    state_checks: int = field(default=0, init=False)
    motion_checks: int = field(default=0, init=False)

    def __post_init__(self):
        if self.step is None:
            self.step = default_step(self.octree.resolution)
        if not self.step > 0:
            raise ValueError("motion step must be positive")
        self._bnd = self.space.bounds.as_array()
        self._half = self.body.half_extents
        self._z = self.body.planar_center_z(self.space)
        self._args = (self.octree.status, self.octree.child, self.octree.origin, self.octree.resolution,
                      self.octree.depth, self._half, self._z)

    def reset_counters(self) -> None:
        self.state_checks = 0
        self.motion_checks = 0

    def is_state_valid(self, s) -> bool:
        self.state_checks += 1
        s = np.asarray(s, dtype=float)
        st, ch, org, res, dep, half, z = self._args
        return bool(state_valid_kernel(self.space.code, s, self._bnd, self.space.check_yaw, st, ch, org, res, dep,
                                       half, z))

    def is_motion_valid(self, a, b, step: float | None = None) -> bool:
        self.motion_checks += 1
        step = self.step if step is None else step
        if not step > 0:
            raise ValueError("motion step must be positive")
        st, ch, org, res, dep, half, z = self._args
        return bool(
            motion_valid_kernel(
                self.space.code, np.asarray(a, dtype=float), np.asarray(b, dtype=float), self.space.yaw_weight,
                self.space.min_turning_radius, self._bnd, self.space.check_yaw, st, ch, org, res, dep, half, z,
                float(step),
            )
        )

    def is_motion_certified(self, a, b, checked: bool = False) -> bool:
        """Motion valid at the working step and again at the finer oracle step.

        Discrete sampling can step over a thin invalid window, for example a
        body corner grazing an obstacle corner while rotating. Planners run this
        stricter check on the edges of every path they return. ``checked``
        skips the working-step pass when the caller has already done it.
        """
        if not checked and not self.is_motion_valid(a, b):
            return False
        fine = min(self.step, oracle_step(self.octree.resolution))
        return fine >= self.step or self.is_motion_valid(a, b, step=fine)

    def body_box(self, s):
        """(center, rotation, half extents) of the body at state ``s``."""
        c, rot = body_pose(self.space.code, np.asarray(s, dtype=float), self._z)
        return c, rot, self._half.copy()


def is_state_valid(s, body: RobotBody, octree: OccupancyOctree, space: StateSpace) -> bool:
    return CollisionChecker(space, body, octree).is_state_valid(s)


def is_motion_valid(a, b, body: RobotBody, octree: OccupancyOctree, space: StateSpace, step: float | None = None) -> bool:
    return CollisionChecker(space, body, octree, step).is_motion_valid(a, b)


__all__ = [
    "CollisionChecker",
    "RobotBody",
    "SpaceKind",
    "default_step",
    "oracle_step",
    "is_motion_valid",
    "is_state_valid",
]
