import math
import struct

import numpy as np
import pytest
from oracles import exhaustive_box_query
from scipy.spatial.transform import Rotation

from sbobench.statespace import Bounds
from sbobench.worldmap import (
    BoxObstacle,
    CylinderObstacle,
    FlatGround,
    HeightField,
    MapFormatError,
    MapHeaderError,
    MapTruncatedError,
    MapVersionError,
    OrientedBox,
    SceneGenerationError,
    SceneSpec,
    build_octree,
    corridor_exists,
    decode_map,
    encode_map,
    generate_scene,
    load_map,
    query_overlapping_voxels,
    random_scene_spec,
    save_map,
)

EYE = np.eye(3)


def box(center, half, rot=EYE):
    return OrientedBox(np.asarray(center, float), np.asarray(rot, float), np.asarray(half, float))


# --- octree construction ----------------------------------------------------


def test_empty_octree():
    oc = build_octree(np.zeros((0, 3), dtype=np.int64), 0.2)
    assert oc.occupied_count == 0
    assert not query_overlapping_voxels(oc, box((0.1, 0.1, 0.1), (5, 5, 5)))
    assert len(oc.occupied_voxels()) == 0


def test_single_voxel_region():
    oc = build_octree([(0, 0, 0)], 0.2, (1.0, 2.0, 3.0))
    assert oc.occupied_count == 1
    assert oc.contains([(0, 0, 0)])[0]
    assert not oc.contains([(1, 0, 0)])[0]
    assert np.allclose(oc.voxel_center((0, 0, 0)), [1.1, 2.1, 3.1])
    inside = box((1.1, 2.1, 3.1), (0.01, 0.01, 0.01))
    assert query_overlapping_voxels(oc, inside)
    outside = box((1.3, 2.1, 3.1), (0.05, 0.05, 0.05))
    assert not query_overlapping_voxels(oc, outside)


def test_membership_matches_hash_set():
    rng = np.random.default_rng(0)
    vox = rng.integers(0, 200, size=(100_000, 3))
    oc = build_octree(vox, 0.2)
    occupied = {tuple(v) for v in vox}
    assert oc.occupied_count == len(occupied)
    probes = np.concatenate([vox[:20000], rng.integers(0, 256, size=(50_000, 3))])
    expected = np.array([tuple(p) in occupied for p in probes])
    assert np.array_equal(oc.contains(probes), expected)
    listed = {tuple(v) for v in oc.occupied_voxels()}
    assert listed == occupied


def test_full_blocks_collapse():
    g = np.stack(np.meshgrid(*[np.arange(8)] * 3, indexing="ij"), -1).reshape(-1, 3)
    oc = build_octree(g, 0.1)
    assert oc.occupied_count == 512
    assert oc.node_count == 1  # one occupied root leaf covers the whole cube


def test_negative_coordinates_rejected():
    with pytest.raises(ValueError):
        build_octree([(-1, 0, 0)], 0.2)


def test_resolution_must_be_positive():
    with pytest.raises(ValueError):
        build_octree([(0, 0, 0)], 0.0)


# --- box queries --------------------------------------------------------------


def test_touching_faces_count_as_overlap():
    oc = build_octree([(0, 0, 0)], 0.2)
    assert query_overlapping_voxels(oc, box((0.3, 0.1, 0.1), (0.1, 0.1, 0.1)))
    assert not query_overlapping_voxels(oc, box((0.3 + 1e-9, 0.1, 0.1), (0.1, 0.1, 0.1)))


def test_rotated_box_grazing_a_corner():
    oc = build_octree([(0, 0, 0)], 1.0)
    rot = Rotation.from_euler("z", 45, degrees=True).as_matrix()
    h = 0.5
    # rotated by 45 degrees, a face of the box is normal to the (1, 1) diagonal
    for gap, expected in ((-1e-6, True), (1e-6, False)):
        c = np.array([1.0, 1.0, 0.5]) + (h + gap) / math.sqrt(2) * np.array([1, 1, 0])
        b = box(c, (h, h, h), rot)
        assert query_overlapping_voxels(oc, b) is expected
        assert exhaustive_box_query([(0, 0, 0)], 1.0, np.zeros(3), c, rot, np.full(3, h)) is expected


def test_box_queries_match_exhaustive_oracle():
    rng = np.random.default_rng(1)
    vox = rng.integers(0, 24, size=(600, 3))
    oc = build_octree(vox, 0.25, (-3.0, -3.0, -3.0))
    disagreements = 0
    for _ in range(300):
        c = rng.uniform(-3.5, 3.5, 3)
        half = rng.uniform(0.02, 0.8, 3)
        rot = Rotation.random(random_state=rng).as_matrix()
        got = query_overlapping_voxels(oc, box(c, half, rot))
        disagreements += got != exhaustive_box_query(vox, 0.25, oc.origin, c, rot, half)
    assert disagreements == 0


def test_oriented_box_validation():
    with pytest.raises(ValueError):
        box((0, 0, 0), (0.0, 1, 1))


# --- scenes -------------------------------------------------------------------

SMALL = Bounds(-10, 10, -5, 5, 0, 2)


def test_flat_ground_only_fills_the_ground_layer():
    oc = generate_scene(SceneSpec(extent=SMALL, seed=1))
    v = oc.occupied_voxels()
    assert len(v) == 100 * 50
    assert np.all(v[:, 2] == 0)
    assert oc.origin[2] + oc.resolution == pytest.approx(0.0)  # layer spans [-res, 0]


def test_height_field_extremes():
    spec = SceneSpec(ground=HeightField(0.5, 20.0), extent=Bounds(-20, 20, -20, 20, 0, 2), seed=2)
    oc = generate_scene(spec)
    top = oc.max_occupied_z()
    assert 0.4 <= top <= 0.6 + 1e-9
    h = spec.ground.height(np.array([5.0]), np.array([5.0]))  # sin(pi/2)^2 -> full amplitude
    assert float(h[0]) == pytest.approx(0.5)


def test_height_field_amplitude_must_stay_below_maxz():
    with pytest.raises(ValueError):
        SceneSpec(ground=HeightField(2.0, 20.0), extent=SMALL)
    with pytest.raises(ValueError):
        HeightField(-0.5, 20.0)
    with pytest.raises(ValueError):
        HeightField(0.5, 0.0)


def test_obstacles_are_rasterized():
    spec = SceneSpec(
        extent=SMALL,
        obstacles=(BoxObstacle((0, 0, 1), (2, 2, 2)), CylinderObstacle((5, 0), 0.5, 1.0)),
        seed=3,
    )
    oc = generate_scene(spec)
    for p, expected in (((0, 0, 1), True), ((0.9, 0.9, 1.9), True), ((5, 0, 0.5), True), ((5.6, 0, 0.5), False),
                        ((3, 3, 1), False), ((5, 0, 1.3), False)):
        assert oc.contains([oc.world_to_voxel(p)])[0] is np.bool_(expected), p


def test_same_seed_gives_identical_map_bytes():
    spec = random_scene_spec(11, Bounds(-30, 30, -15, 15, 0, 2), houses=6, posts=6, plants=10)
    assert encode_map(generate_scene(spec)) == encode_map(generate_scene(spec))
    other = random_scene_spec(12, Bounds(-30, 30, -15, 15, 0, 2), houses=6, posts=6, plants=10)
    assert encode_map(generate_scene(other)) != encode_map(generate_scene(spec))


def test_corridor_check():
    wall = (BoxObstacle((0, 0, 1), (1, 10, 2)),)  # spans the whole y range
    assert not corridor_exists(wall, SMALL, 1.5)
    gap = (BoxObstacle((0, -2, 1), (1, 6, 2)),)  # leaves y in [1, 5]
    assert corridor_exists(gap, SMALL, 1.5)
    assert not corridor_exists(gap, SMALL, 4.5)


def test_blocked_scene_is_jittered_or_rejected():
    wall = (BoxObstacle((0, 0, 1), (1, 10, 2)),)
    with pytest.raises(SceneGenerationError):
        generate_scene(SceneSpec(extent=SMALL, obstacles=wall, seed=4, max_retries=5, jitter=0.0))
    # a wall that only narrowly blocks is moved clear by the retries
    near = (BoxObstacle((0, 0.5, 1), (1, 9.5, 2)),)
    oc = generate_scene(SceneSpec(extent=SMALL, obstacles=near, seed=4, corridor_width=0.5, max_retries=50))
    assert oc.occupied_count > 0


# --- map files ----------------------------------------------------------------


def test_round_trip(tmp_path):
    spec = random_scene_spec(5, Bounds(-30, 30, -15, 15, 0, 2), houses=6, posts=6, plants=10)
    oc = generate_scene(spec)
    path = tmp_path / "m.sbom"
    size = save_map(oc, path)
    assert size == path.stat().st_size
    back = load_map(path)
    assert back.same_occupancy(oc)
    assert back.occupied_count == oc.occupied_count
    assert back.resolution == oc.resolution and np.array_equal(back.origin, oc.origin)


def test_dense_block_compresses_below_coordinate_listing():
    g = np.stack(np.meshgrid(*[np.arange(64)] * 3, indexing="ij"), -1).reshape(-1, 3)
    data = encode_map(build_octree(g, 0.2))
    naive = len(g) * 3 * 4  # three int32 coordinates per voxel
    assert len(data) < naive
    assert decode_map(data).occupied_count == 64**3


def test_header_errors():
    data = encode_map(build_octree([(1, 2, 3)], 0.2))
    with pytest.raises(MapHeaderError):
        decode_map(b"XXXX" + data[4:])
    with pytest.raises(MapTruncatedError):
        decode_map(data[:10])
    wrong_version = data[:4] + struct.pack("<H", 99) + data[6:]
    with pytest.raises(MapVersionError):
        decode_map(wrong_version)
    with pytest.raises(MapTruncatedError):
        decode_map(data[:-1])
    with pytest.raises(MapFormatError):
        decode_map(data + b"\x00")
    # the three errors are distinct classes sharing one base
    assert len({MapHeaderError, MapVersionError, MapTruncatedError}) == 3
    assert all(issubclass(e, MapFormatError) for e in (MapHeaderError, MapVersionError, MapTruncatedError))


def test_empty_map_round_trip():
    oc = build_octree(np.zeros((0, 3), dtype=np.int64), 0.5, (1, 2, 3))
    back = decode_map(encode_map(oc))
    assert back.occupied_count == 0 and back.same_occupancy(oc)


def test_ground_default_is_flat():
    assert isinstance(SceneSpec().ground, FlatGround)
