"""Pose types, bounds and metric state spaces (SE2, SE3, Dubins, Reeds-Shepp).

States are plain float64 arrays: ``[x, y, yaw]`` for the planar kinds and
``[x, y, z, qw, qx, qy, qz]`` for SE3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from numba import njit

from . import curves

TWO_PI = 2.0 * math.pi
# A yaw interval at least this wide is treated as the full circle.
_FULL_CIRCLE = TWO_PI - 0.01


class SpaceKind(str, Enum):
    SE2 = "SE2"
    SE3 = "SE3"
    DUBINS = "DUBINS"
    REEDS = "REEDS"

    @property
    def is_curve(self) -> bool:
        return self in (SpaceKind.DUBINS, SpaceKind.REEDS)


class Pose2(NamedTuple):
    x: float
    y: float
    yaw: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, wrap_angle(self.yaw)], dtype=float)


class Pose3(NamedTuple):
    x: float
    y: float
    z: float
    qw: float = 1.0
    qx: float = 0.0
    qy: float = 0.0
    qz: float = 0.0

    def as_array(self) -> np.ndarray:
        q = np.array([self.qw, self.qx, self.qy, self.qz], dtype=float)
        q /= np.linalg.norm(q)
        return np.array([self.x, self.y, self.z, *q], dtype=float)


@dataclass(frozen=True)
class Bounds:
    minx: float = -100.0
    maxx: float = 100.0
    miny: float = -50.0
    maxy: float = 50.0
    minz: float = 0.0
    maxz: float = 2.0
    minyaw: float = -3.14
    maxyaw: float = 3.14

    def __post_init__(self):
        for axis in ("x", "y", "z", "yaw"):
            lo, hi = getattr(self, "min" + axis), getattr(self, "max" + axis)
            if not lo <= hi:
                raise ValueError(f"bounds: min{axis}={lo} exceeds max{axis}={hi}")

    @property
    def low(self) -> np.ndarray:
        return np.array([self.minx, self.miny, self.minz])

    @property
    def high(self) -> np.ndarray:
        return np.array([self.maxx, self.maxy, self.maxz])

    @property
    def yaw_is_full_circle(self) -> bool:
        return self.maxyaw - self.minyaw >= _FULL_CIRCLE

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.minx, self.maxx, self.miny, self.maxy, self.minz, self.maxz, self.minyaw, self.maxyaw]
        )


def wrap_angle(a):
    """Wrap an angle (scalar or array) to [-pi, pi)."""
    return (np.asarray(a) + math.pi) % TWO_PI - math.pi if isinstance(a, np.ndarray) else (a + math.pi) % TWO_PI - math.pi


# ---------------------------------------------------------------------------
# numba primitives shared with the collision kernels


@njit(cache=True)
def _wrap(a):
    return (a + math.pi) % (2.0 * math.pi) - math.pi


@njit(cache=True)
def quat_angle(q1, q2):
    # rotation angle = 4 atan2(|q1 - q2|, |q1 + q2|) on the same hemisphere; exact at identity, unlike acos
    d = q1[0] * q2[0] + q1[1] * q2[1] + q1[2] * q2[2] + q1[3] * q2[3]
    sign = 1.0 if d >= 0.0 else -1.0
    diff = 0.0
    summ = 0.0
    for i in range(4):
        a = q1[i] - sign * q2[i]
        b = q1[i] + sign * q2[i]
        diff += a * a
        summ += b * b
    return 4.0 * math.atan2(math.sqrt(diff), math.sqrt(summ))


@njit(cache=True)
def slerp(q1, q2, t):
    d = q1[0] * q2[0] + q1[1] * q2[1] + q1[2] * q2[2] + q1[3] * q2[3]
    sign = 1.0
    if d < 0.0:
        d = -d
        sign = -1.0
    out = np.empty(4)
    if d > 0.9999995:
        for i in range(4):
            out[i] = (1.0 - t) * q1[i] + t * sign * q2[i]
    else:
        theta = math.acos(d)
        s = math.sin(theta)
        w1 = math.sin((1.0 - t) * theta) / s
        w2 = sign * math.sin(t * theta) / s
        for i in range(4):
            out[i] = w1 * q1[i] + w2 * q2[i]
    n = math.sqrt(out[0] ** 2 + out[1] ** 2 + out[2] ** 2 + out[3] ** 2)
    for i in range(4):
        out[i] /= n
    return out


KIND_SE2, KIND_SE3, KIND_DUBINS, KIND_REEDS = 0, 1, 2, 3
_KIND_CODE = {SpaceKind.SE2: KIND_SE2, SpaceKind.SE3: KIND_SE3, SpaceKind.DUBINS: KIND_DUBINS, SpaceKind.REEDS: KIND_REEDS}


@njit(cache=True)
def kernel_distance(kind, a, b, yaw_weight, radius):
    if kind == 0:
        return math.hypot(b[0] - a[0], b[1] - a[1]) + yaw_weight * abs(_wrap(b[2] - a[2]))
    if kind == 1:
        dx = b[0] - a[0]
        dy = b[1] - a[1]
        dz = b[2] - a[2]
        return math.sqrt(dx * dx + dy * dy + dz * dz) + yaw_weight * quat_angle(a[3:], b[3:])
    return curves.curve_length(kind == 3, a, b, radius)


@njit(cache=True)
def kernel_interpolate(kind, a, b, yaw_weight, radius, fractions):
    """States at the given fractions of the local connection a -> b."""
    n = fractions.shape[0]
    if kind == 2 or kind == 3:
        return curves.curve_interpolate(kind == 3, a, b, radius, fractions)
    out = np.empty((n, a.shape[0]))
    if kind == 0:
        dyaw = _wrap(b[2] - a[2])
        for i in range(n):
            t = fractions[i]
            out[i, 0] = a[0] + t * (b[0] - a[0])
            out[i, 1] = a[1] + t * (b[1] - a[1])
            out[i, 2] = _wrap(a[2] + t * dyaw)
        return out
    for i in range(n):
        t = fractions[i]
        for k in range(3):
            out[i, k] = a[k] + t * (b[k] - a[k])
        out[i, 3:] = slerp(a[3:], b[3:], t)
    return out


@njit(cache=True)
def kernel_distances_from(kind, a, many, yaw_weight, radius):
    out = np.empty(many.shape[0])
    for i in range(many.shape[0]):
        out[i] = kernel_distance(kind, a, many[i], yaw_weight, radius)
    return out


@njit(cache=True)
def kernel_distances_to(kind, many, b, yaw_weight, radius):
    out = np.empty(many.shape[0])
    for i in range(many.shape[0]):
        out[i] = kernel_distance(kind, many[i], b, yaw_weight, radius)
    return out


@njit(cache=True)
def kernel_in_bounds(kind, s, bnd, check_yaw):
    if s[0] < bnd[0] or s[0] > bnd[1] or s[1] < bnd[2] or s[1] > bnd[3]:
        return False
    if kind == 1:
        return bnd[4] <= s[2] <= bnd[5]
    if check_yaw:
        return bnd[6] <= s[2] <= bnd[7]
    return True


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateSpace:
    """A bounded metric pose space."""

    kind: SpaceKind
    bounds: Bounds = Bounds()
    min_turning_radius: float = 1.5
    yaw_weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if self.kind.is_curve and not self.min_turning_radius > 0:
            raise ValueError("min_turning_radius must be positive for curve spaces")
        if self.yaw_weight < 0:
            raise ValueError("yaw_weight must be non-negative")

    # --- geometry -----------------------------------------------------
    @property
    def code(self) -> int:
        return _KIND_CODE[self.kind]

    @property
    def state_dim(self) -> int:
        return 7 if self.kind is SpaceKind.SE3 else 3

    @property
    def position_dim(self) -> int:
        return 3 if self.kind is SpaceKind.SE3 else 2

    @property
    def check_yaw(self) -> bool:
        return self.kind is not SpaceKind.SE3 and not self.bounds.yaw_is_full_circle

    def measure(self) -> tuple[int, float]:
        """(dimension, volume) of the bounded space in metric units; flat axes are dropped."""
        b = self.bounds
        extents = [b.maxx - b.minx, b.maxy - b.miny]
        if self.kind is SpaceKind.SE3:
            extents.append(b.maxz - b.minz)
            volume = math.prod(e for e in extents if e > 0)
            dim = sum(1 for e in extents if e > 0)
            if self.yaw_weight > 0:
                # SO(3) under the geodesic angle metric has volume pi^2 over 3 dims
                dim += 3
                volume *= math.pi**2 * self.yaw_weight**3
            return dim, volume
        extents.append(self.yaw_weight * (b.maxyaw - b.minyaw))
        kept = [e for e in extents if e > 0]
        return len(kept), math.prod(kept)

    def as_state(self, s) -> np.ndarray:
        arr = s.as_array() if isinstance(s, (Pose2, Pose3)) else np.asarray(s, dtype=float)
        if arr.shape != (self.state_dim,):
            raise ValueError(f"{self.kind.value} state must have {self.state_dim} components, got {arr.shape}")
        return arr

    def position(self, s) -> np.ndarray:
        return np.asarray(s)[..., : self.position_dim]

    def distance(self, a, b) -> float:
        return float(kernel_distance(self.code, self.as_state(a), self.as_state(b), self.yaw_weight, self.min_turning_radius))

    def distances_from(self, a, many: np.ndarray) -> np.ndarray:
        """distance(a, m) for every row m."""
        many = np.ascontiguousarray(many, dtype=float).reshape(-1, self.state_dim)
        if self.kind is SpaceKind.SE2:
            d = many[:, :2] - a[:2]
            dyaw = np.abs((many[:, 2] - a[2] + math.pi) % TWO_PI - math.pi)
            return np.hypot(d[:, 0], d[:, 1]) + self.yaw_weight * dyaw
        return kernel_distances_from(self.code, np.asarray(a, dtype=float), many, self.yaw_weight, self.min_turning_radius)

    def distances_to(self, many: np.ndarray, b) -> np.ndarray:
        """distance(m, b) for every row m."""
        if self.kind is not SpaceKind.DUBINS:
            return self.distances_from(b, many)
        many = np.ascontiguousarray(many, dtype=float).reshape(-1, self.state_dim)
        return kernel_distances_to(self.code, many, np.asarray(b, dtype=float), self.yaw_weight, self.min_turning_radius)

    @property
    def symmetric(self) -> bool:
        return self.kind is not SpaceKind.DUBINS

    def interpolate(self, a, b, t: float) -> np.ndarray:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"interpolation fraction {t} outside [0, 1]")
        a = self.as_state(a)
        b = self.as_state(b)
        if t == 0.0:
            return a.copy()
        if t == 1.0:
            return b.copy()
        return self.interpolate_many(a, b, np.array([t]))[0]

    def interpolate_many(self, a, b, fractions: np.ndarray) -> np.ndarray:
        return kernel_interpolate(
            self.code, np.asarray(a, dtype=float), np.asarray(b, dtype=float), self.yaw_weight,
            self.min_turning_radius, np.asarray(fractions, dtype=float),
        )

    def steer(self, a: np.ndarray, b: np.ndarray, max_distance: float) -> tuple[np.ndarray, float]:
        """Move from ``a`` toward ``b`` by at most ``max_distance``; returns (state, distance)."""
        d = self.distance(a, b)
        if d <= max_distance:
            return b, d
        return self.interpolate_many(a, b, np.array([max_distance / d]))[0], max_distance

    def satisfies_bounds(self, s) -> bool:
        return bool(kernel_in_bounds(self.code, self.as_state(s), self.bounds.as_array(), self.check_yaw))

    # --- sampling -----------------------------------------------------
    def sample_uniform(self, rng: np.random.Generator) -> np.ndarray:
        b = self.bounds
        if self.kind is SpaceKind.SE3:
            x, y, z, u1, u2, u3 = rng.random(6)
            return np.array(
                [b.minx + x * (b.maxx - b.minx), b.miny + y * (b.maxy - b.miny), b.minz + z * (b.maxz - b.minz),
                 *random_quaternion(u1, u2, u3)]
            )
        x, y, yaw = rng.random(3)
        return np.array(
            [b.minx + x * (b.maxx - b.minx), b.miny + y * (b.maxy - b.miny), b.minyaw + yaw * (b.maxyaw - b.minyaw)]
        )

    def sample_orientation(self, rng: np.random.Generator) -> np.ndarray:
        """Orientation part only: yaw (planar kinds) or a unit quaternion (SE3)."""
        b = self.bounds
        if self.kind is SpaceKind.SE3:
            return np.array(random_quaternion(*rng.random(3)))
        return np.array([b.minyaw + rng.random() * (b.maxyaw - b.minyaw)])


def random_quaternion(u1: float, u2: float, u3: float) -> tuple[float, float, float, float]:
    """Uniform unit quaternion (w, x, y, z) from three uniform numbers (Shoemake)."""
    a = math.sqrt(1.0 - u1)
    b = math.sqrt(u1)
    return (
        b * math.cos(TWO_PI * u3),
        a * math.sin(TWO_PI * u2),
        a * math.cos(TWO_PI * u2),
        b * math.sin(TWO_PI * u3),
    )


def quaternion_from_yaw(yaw: float) -> np.ndarray:
    return np.array([math.cos(yaw / 2), 0.0, 0.0, math.sin(yaw / 2)])


# ---------------------------------------------------------------------------
# functional API


def sample_uniform(space: StateSpace, rng: np.random.Generator) -> np.ndarray:
    return space.sample_uniform(rng)


def distance(space: StateSpace, a, b) -> float:
    return space.distance(a, b)


def interpolate(space: StateSpace, a, b, t: float) -> np.ndarray:
    return space.interpolate(a, b, t)


def satisfies_bounds(space: StateSpace, s) -> bool:
    return space.satisfies_bounds(s)
