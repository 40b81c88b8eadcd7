"""Occupancy octree maps, the binary map format, and procedural scenes."""

from .mapfile import (
    MapFormatError,
    MapHeaderError,
    MapTruncatedError,
    MapVersionError,
    decode_map,
    encode_map,
    load_map,
    save_map,
)
from .octree import OccupancyOctree, OrientedBox, build_octree, query_overlapping_voxels
from .scene import (
    BoxObstacle,
    CylinderObstacle,
    FlatGround,
    HeightField,
    SceneGenerationError,
    SceneSpec,
    corridor_exists,
    generate_scene,
    random_scene_spec,
    voxelize_scene,
)

__all__ = [
    "BoxObstacle",
    "CylinderObstacle",
    "FlatGround",
    "HeightField",
    "MapFormatError",
    "MapHeaderError",
    "MapTruncatedError",
    "MapVersionError",
    "OccupancyOctree",
    "OrientedBox",
    "SceneGenerationError",
    "SceneSpec",
    "build_octree",
    "corridor_exists",
    "decode_map",
    "encode_map",
    "generate_scene",
    "load_map",
    "query_overlapping_voxels",
    "random_scene_spec",
    "save_map",
    "voxelize_scene",
]
