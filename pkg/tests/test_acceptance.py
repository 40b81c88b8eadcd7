"""Acceptance criteria 1 to 9.

Each test records a one-line verdict that is printed in the terminal summary.
The session fixture generates the shared 25-problem suite on the default dense
scene, which takes about 25 x 30 s of ground-truth search.
"""

import math
import statistics
from pathlib import Path as FsPath

import numpy as np
import pytest
from acceptance_report import record
from oracles import brute_force_curve_length, exhaustive_box_query, grid_shortest_path
from scipy.spatial.transform import Rotation

from sbobench.bench import BenchmarkConfig, generate_problems, read_results
from sbobench.bench.cli import main
from sbobench.bench.problems import body_from_config, space_from_config
from sbobench.bench.runner import load_octree, run_once
from sbobench.collision import CollisionChecker, RobotBody
from sbobench.metrics import path_length, path_smoothness
from sbobench.planners import (
    PLANNERS,
    Budget,
    Path,
    PlannerParams,
    Problem,
    Status,
    plan_rrt_star,
    shortcut_simplify,
)
from sbobench.statespace import Bounds, SpaceKind, StateSpace, dubins_path, reeds_shepp_path
from sbobench.worldmap import (
    BoxObstacle,
    OrientedBox,
    SceneSpec,
    generate_scene,
    query_overlapping_voxels,
    random_scene_spec,
)

R = 1.5
LISTING = FsPath(__file__).parent / "data" / "listing.yaml"


def seeded(seed):
    return np.random.default_rng(seed)


@pytest.fixture(scope="module")
def suite():
    """25 seeded problems at least 85 m apart on the default dense scene, with 30 s ground truths."""
    cfg = BenchmarkConfig(min_euclidean_dist_start_to_goal=85.0, master_seed=1)
    octree = load_octree(cfg)
    space = space_from_config(cfg)
    problems = generate_problems(cfg, octree, space, count=25)
    return cfg, octree, space, problems


# --- 1 ------------------------------------------------------------------------------


def test_criterion_1_metric_anchors():
    rng = seeded(1)
    collinear = []
    for _ in range(1000):
        d = rng.normal(size=3)
        t = np.sort(rng.uniform(-100, 100, int(rng.integers(3, 40))))
        pts = rng.uniform(-100, 100, 3) + t[:, None] * d
        collinear.append(path_smoothness(pts, position_dim=3))
        collinear.append(path_smoothness(rng.uniform(-100, 100, 2) + np.outer(t, d[:2])))
    turn = path_smoothness(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    ok = all(v == 0.0 for v in collinear) and abs(turn - math.pi / 2) <= 1e-12
    assert record(1, ok, f"max collinear smoothness {max(collinear)!r}, right angle error {abs(turn - math.pi / 2):.1e}")


# --- 2 ------------------------------------------------------------------------------


def test_criterion_2_curve_oracles():
    rng = seeded(2)
    b = Bounds(-20, 20, -20, 20, 0, 2)
    sp = StateSpace(SpaceKind.SE2, b)
    pairs = [(sp.sample_uniform(rng), sp.sample_uniform(rng)) for _ in range(10_000)]
    below_euclid = rs_longer = 0
    for a, g in pairs:
        du = dubins_path(a, g, R).total_length
        rs = reeds_shepp_path(a, g, R).total_length
        below_euclid += du < math.hypot(g[0] - a[0], g[1] - a[1]) - 1e-9
        rs_longer += rs > du + 1e-9
    worst = 0.0
    for a, g in pairs[:100]:
        for fn, rev in ((dubins_path, False), (reeds_shepp_path, True)):
            worst = max(worst, abs(fn(a, g, R).total_length - brute_force_curve_length(a, g, R, rev)))
    ok = below_euclid == 0 and rs_longer == 0 and worst <= 1e-4
    assert record(2, ok, f"dubins<euclid {below_euclid}, rs>dubins {rs_longer}, worst sweep gap {worst:.1e} m")


# --- 3 ------------------------------------------------------------------------------


def _oracle_state_valid(s, kind, body, bounds, voxels, octree):
    if kind is SpaceKind.SE3:
        center = np.asarray(s[:3])
        rot = Rotation.from_quat([s[4], s[5], s[6], s[3]]).as_matrix()
        inside = bounds.minz <= s[2] <= bounds.maxz
    else:
        center = np.array([s[0], s[1], bounds.minz + body.clearance + body.extents[2] / 2])
        rot = Rotation.from_euler("z", s[2]).as_matrix()
        inside = bounds.minyaw <= s[2] <= bounds.maxyaw
    inside = inside and bounds.minx <= s[0] <= bounds.maxx and bounds.miny <= s[1] <= bounds.maxy
    half = np.asarray(body.extents) / 2
    return inside and not exhaustive_box_query(voxels, octree.resolution, octree.origin, center, rot, half)


def test_criterion_3_collision_oracle_equivalence():
    rng = seeded(3)
    b = Bounds(-8, 8, -8, 8, 0, 2)
    body = RobotBody()
    box_disagree = state_disagree = cases = hits = 0
    for m in range(10):
        octree = generate_scene(random_scene_spec(100 + m, b, houses=3, posts=5, plants=8))
        voxels = octree.occupied_voxels()
        for kind in (SpaceKind.SE2, SpaceKind.SE3):
            sp = StateSpace(kind, b)
            chk = CollisionChecker(sp, body, octree)
            for _ in range(50):
                s = sp.sample_uniform(rng)
                s[:2] += rng.uniform(-0.5, 0.5, 2)  # some poses leave the bounds
                expected = _oracle_state_valid(s, kind, body, b, voxels, octree)
                state_disagree += chk.is_state_valid(s) != expected
                hits += not expected
                # a free-standing oriented box of random size and attitude
                c = np.append(rng.uniform(-8, 8, 2), rng.uniform(-0.5, 2.5))
                rot = Rotation.random(random_state=rng).as_matrix()
                half = rng.uniform(0.05, 1.2, 3)
                got = query_overlapping_voxels(octree, OrientedBox(c, rot, half))
                box_disagree += got != exhaustive_box_query(voxels, octree.resolution, octree.origin, c, rot, half)
                cases += 1
    ok = box_disagree == 0 and state_disagree == 0
    assert record(3, ok, f"{cases} cases, box disagreements {box_disagree}, state disagreements "
                         f"{state_disagree} ({hits} invalid poses)")


# --- 4 ------------------------------------------------------------------------------


def test_criterion_4_grid_oracle_optimality():
    b = Bounds(0, 20, 0, 20, 0, 2, 0.0, 0.0)
    rng = seeded(4)
    obstacles = []
    for _ in range(5):
        w, d = rng.uniform(1.5, 4, 2)
        x, y = rng.uniform(4, 16, 2)
        obstacles.append(BoxObstacle((float(x), float(y), 1.0), (float(w), float(d), 2.0)))
    octree = generate_scene(SceneSpec(extent=b, obstacles=tuple(obstacles), seed=1))
    body = RobotBody()
    start, goal = np.array([1.0, 10.0, 0.0]), np.array([19.0, 10.0, 0.0])

    # occupied voxels at body height, inflated on a 0.05 m grid by the body half-width
    vox, res, org = octree.occupied_voxels(), octree.resolution, np.asarray(octree.origin)
    z0 = org[2] + vox[:, 2] * res
    zlo = b.minz + body.clearance
    layer = (z0 <= zlo + body.extents[2]) & (z0 + res >= zlo)
    centers = np.unique(org[:2] + (vox[layer][:, :2] + 0.5) * res, axis=0)
    cell = 0.05
    n = int(round(20 / cell)) + 1
    blocked = np.zeros((n, n), dtype=bool)
    reach = np.asarray(body.extents[:2]) / 2 + res / 2
    for c in centers:
        lo = np.maximum(np.ceil((c - reach) / cell - 1e-9).astype(int), 0)
        hi = np.minimum(np.floor((c + reach) / cell + 1e-9).astype(int), n - 1)
        if np.all(lo <= hi):
            blocked[lo[0]:hi[0] + 1, lo[1]:hi[1] + 1] = True
    grid = grid_shortest_path(blocked, cell, start[:2], goal[:2], (0.0, 0.0))

    problem = Problem(StateSpace(SpaceKind.SE2, b), octree, body, start, goal)
    res_ = plan_rrt_star(problem, Budget.iterations(200_000), rng=seeded(0))
    xy = res_.path.states[:, :2]
    length = float(np.sum(np.hypot(*np.diff(xy, axis=0).T)))
    ratio = length / grid
    ok = res_.status is Status.EXACT and abs(ratio - 1) <= 0.05
    assert record(4, ok, f"RRT* {length:.2f} m vs grid {grid:.2f} m, ratio {ratio:.3f}")


# --- 5 ------------------------------------------------------------------------------


def test_criterion_5_anytime_monotonicity(suite):
    cfg, octree, space, problems = suite
    body = body_from_config(cfg)
    violations = runs = 0
    for i, bp in enumerate(problems[:20]):
        problem = Problem(space, octree, body, bp.start, bp.goal, cfg.goal_tolerance)
        for name, plan in PLANNERS.items():
            res = plan(problem, Budget.wall_clock(1.0), PlannerParams(), seeded(500 + i))
            costs = [c for _, c in res.cost_trace]
            violations += any(b > a for a, b in zip(costs, costs[1:]))
            runs += 1
    assert record(5, violations == 0, f"{runs} runs, {violations} traces with a cost increase")


# --- 6 and 7 ----------------------------------------------------------------------------


def _campaign(suite, planner, space, repeats, params=None):
    cfg, octree, _, problems = suite
    budget = Budget.wall_clock(1.0)
    return [run_once(planner, bp, cfg, space, octree, budget, rep, params) for bp in problems
            for rep in range(repeats)]


def _rates(rows):
    exact = [r for r in rows if r.status is Status.EXACT]
    med = statistics.median(r.normalized_length for r in exact) if exact else math.inf
    return len(exact) / len(rows), med


def test_criterion_6_parallel_ensemble(suite):
    space = suite[2]
    single = _rates(_campaign(suite, "RRTstar", space, 4))
    forest = _rates(_campaign(suite, "CForest", space, 4, PlannerParams(workers=8)))
    ok = forest[1] <= single[1] and forest[0] >= single[0]
    assert record(6, ok, f"CForest(8) exact {100 * forest[0]:.0f}% median {forest[1]:.1f}; "
                         f"RRT* exact {100 * single[0]:.0f}% median {single[1]:.1f}")


def test_criterion_7_fmt_degrades_in_dubins(suite):
    cfg = suite[0]
    se2 = _rates(_campaign(suite, "FMTstar", space_from_config(cfg, SpaceKind.SE2), 1))[0]
    dub = _rates(_campaign(suite, "FMTstar", space_from_config(cfg, SpaceKind.DUBINS), 1))[0]
    ok = se2 - dub >= 0.10
    assert record(7, ok, f"FMT* exact SE2 {100 * se2:.0f}%, DUBINS {100 * dub:.0f}%")


# --- 8 ------------------------------------------------------------------------------


def _without_wall_time(path):
    lines = path.read_text().splitlines()
    col = lines[0].split(",").index("wall_time_s")
    return [[v for k, v in enumerate(line.split(",")) if k != col] for line in lines]


def test_criterion_8_protocol_replication(tmp_path):
    out = tmp_path / "listing"
    assert main(["bench", "--config", str(LISTING), "--out", str(out)]) == 0
    rows = read_results(out / "result.log")
    cells = {(r.planner, r.problem_id, r.repeat) for r in rows}
    figures = tmp_path / "figures"
    assert main(["plot", str(out / "result.log"), "--out", str(figures)]) == 0
    drawn = all((figures / f"SE2_{k}.svg").stat().st_size > 0 for k in ("status", "length", "smoothness"))

    # the same listing under an iteration budget, with short searches so both reruns stay quick
    fast = tmp_path / "fast.yaml"
    fast.write_text(LISTING.read_text() + "\nplanner_iterations: 300\nground_truth_iterations: 3000\n")
    for name in ("a", "b"):
        assert main(["bench", "--config", str(fast), "--out", str(tmp_path / name), "--budget-mode",
                     "iterations", "--no-plots"]) == 0
    same = _without_wall_time(tmp_path / "a" / "result.log") == _without_wall_time(tmp_path / "b" / "result.log")
    ok = len(rows) == 700 and len(cells) == 700 and drawn and same
    assert record(8, ok, f"{len(rows)} rows, figures {'written' if drawn else 'missing'}, "
                         f"iteration rerun {'identical' if same else 'differs'}")


# --- 9 ------------------------------------------------------------------------------


def _random_valid_path(sp, chk, rng):
    while True:
        s = sp.sample_uniform(rng)
        if chk.is_state_valid(s):
            break
    states = [s]
    target = int(rng.integers(3, 9))
    while len(states) < target:
        nxt = states[-1].copy()
        nxt[:2] += rng.uniform(-5, 5, 2)
        nxt[2] = rng.uniform(-math.pi, math.pi)
        if sp.satisfies_bounds(nxt) and chk.is_motion_valid(states[-1], nxt):
            states.append(nxt)
    return Path(np.array(states), sp.kind)


def test_criterion_9_simplification_contract(suite):
    cfg, octree, space, problems = suite
    chk = CollisionChecker(space, body_from_config(cfg), octree)
    rng = seeded(9)
    longer = colliding = 0
    for _ in range(1000):
        path = _random_valid_path(space, chk, rng)
        problem = Problem(space, octree, body_from_config(cfg), path.start, path.end, cfg.goal_tolerance)
        out = shortcut_simplify(path, problem, 20, rng, chk)
        longer += path_length(out, space) > path_length(path, space) + 1e-9
        colliding += not all(chk.is_motion_valid(out.states[i], out.states[i + 1]) for i in range(len(out) - 1))
    ok = longer == 0 and colliding == 0
    assert record(9, ok, f"1000 paths, {longer} lengthened, {colliding} colliding")
