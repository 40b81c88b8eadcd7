"""Pose spaces and car-like curve families."""

from .curves import CurveWord, Direction, Segment, SegmentType, dubins_path, reeds_shepp_path
from .spaces import (
    Bounds,
    Pose2,
    Pose3,
    SpaceKind,
    StateSpace,
    distance,
    interpolate,
    quaternion_from_yaw,
    sample_uniform,
    satisfies_bounds,
    wrap_angle,
)

__all__ = [
    "Bounds",
    "CurveWord",
    "Direction",
    "Pose2",
    "Pose3",
    "Segment",
    "SegmentType",
    "SpaceKind",
    "StateSpace",
    "distance",
    "dubins_path",
    "interpolate",
    "quaternion_from_yaw",
    "reeds_shepp_path",
    "sample_uniform",
    "satisfies_bounds",
    "wrap_angle",
]
