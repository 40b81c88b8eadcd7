"""Sampling-based optimal motion planning on occupancy octrees, with a benchmark harness."""

from .collision import CollisionChecker, RobotBody, is_motion_valid, is_state_valid
from .statespace import Bounds, SpaceKind, StateSpace

__version__ = "0.1.0"


def warmup() -> None:
    """Load or compile every numerical kernel so timed runs do not pay for it."""
    import numpy as np

    from .planners.common import NearestIndex
    from .worldmap import BoxObstacle, SceneSpec, generate_scene
    from .worldmap.mapfile import decode_map, encode_map

    bounds = Bounds(-4, 4, -4, 4, 0, 2)
    octree = generate_scene(SceneSpec(extent=bounds, obstacles=(BoxObstacle((0, 0, 1), (1, 1, 2)),), resolution=0.5))
    decode_map(encode_map(octree))
    octree.contains(np.zeros((1, 3), dtype=np.int64))
    body = RobotBody((0.5, 0.5, 0.5))
    for kind in SpaceKind:
        space = StateSpace(kind, bounds)
        rng = np.random.default_rng(0)
        a, b = space.sample_uniform(rng), space.sample_uniform(rng)
        space.distance(a, b)
        space.distances_from(a, np.stack([a, b]))
        space.distances_to(np.stack([a, b]), b)
        space.interpolate(a, b, 0.5)
        checker = CollisionChecker(space, body, octree)
        checker.is_state_valid(a)
        checker.is_motion_valid(a, b)
        checker.is_motion_valid(a, a)
        index = NearestIndex(space)
        index.add(a)
        for direction in ("to", "from"):
            index.within(b, 1.0, direction)
            index.k_nearest(b, 1, direction)


__all__ = [
    "Bounds",
    "CollisionChecker",
    "RobotBody",
    "SpaceKind",
    "StateSpace",
    "is_motion_valid",
    "is_state_valid",
    "warmup",
]
