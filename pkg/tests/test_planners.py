import math

import numpy as np
import pytest

from sbobench.collision import CollisionChecker, RobotBody
from sbobench.metrics import path_length, path_smoothness
from sbobench.planners import (
    PLANNERS,
    Budget,
    InvalidProblemError,
    NearestIndex,
    Path,
    PlannerParams,
    Problem,
    Status,
    TreeEngine,
    informed_sample,
    interpolate_path,
    path_cost,
    plan_aps,
    plan_cforest,
    plan_fmt_star,
    plan_informed_rrt_star,
    plan_lazy_prm_star,
    plan_prm_star,
    plan_rrt_star,
    prm_star_k,
    rewiring_radius,
    shortcut_simplify,
)
from sbobench.planners.rrtstar import _run
from sbobench.statespace import Bounds, SpaceKind, StateSpace
from sbobench.worldmap import BoxObstacle, SceneSpec, generate_scene, random_scene_spec

SMALL = Bounds(-10.0, 10.0, -10.0, 10.0, 0.0, 2.0)
SEEDS = range(20)


def seeded(seed):
    return np.random.default_rng(seed)


# --- scenario fixtures --------------------------------------------------------


@pytest.fixture(scope="module")
def open_problem():
    """Default 200 x 100 m world without obstacles, start and goal 85 m apart."""
    b = Bounds()
    oc = generate_scene(SceneSpec(extent=b))
    return Problem(StateSpace(SpaceKind.SE2, b), oc, RobotBody(), [-42.5, 0.0, 0.0], [42.5, 0.0, 0.0])


@pytest.fixture(scope="module")
def wall_problem(wall_scene):
    return Problem(StateSpace(SpaceKind.SE2, SMALL), wall_scene, RobotBody(), [-6.0, -6.0, 0.0], [6.0, -6.0, 0.0])


@pytest.fixture(scope="module")
def sealed_problem():
    """The goal sits in a closed 4.4 m square room; the rest of the world is open."""
    walls = (
        BoxObstacle((6.0, 2.5, 1.0), (5.6, 0.6, 2.0)),
        BoxObstacle((6.0, -2.5, 1.0), (5.6, 0.6, 2.0)),
        BoxObstacle((3.5, 0.0, 1.0), (0.6, 5.6, 2.0)),
        BoxObstacle((8.5, 0.0, 1.0), (0.6, 5.6, 2.0)),
    )
    oc = generate_scene(SceneSpec(extent=SMALL, obstacles=walls, seed=0))
    return Problem(StateSpace(SpaceKind.SE2, SMALL), oc, RobotBody(), [-6.0, 0.0, 0.0], [6.0, 0.0, 0.0])


@pytest.fixture(scope="module")
def clutter_problems():
    b = Bounds(-25, 25, -12.5, 12.5, 0, 2)
    oc = generate_scene(random_scene_spec(21, b, houses=10, posts=20, plants=40))
    sp = StateSpace(SpaceKind.SE2, b)
    chk = CollisionChecker(sp, RobotBody(), oc)
    rng = seeded(77)
    out = []
    while len(out) < 20:
        a, g = sp.sample_uniform(rng), sp.sample_uniform(rng)
        if np.hypot(*(a[:2] - g[:2])) > 25 and chk.is_state_valid(a) and chk.is_state_valid(g):
            out.append(Problem(sp, oc, RobotBody(), a, g))
    return out


def dense_valid(problem, path):
    chk = problem.checker()
    step = problem.map.resolution / 10
    s = path.states
    return all(chk.is_motion_valid(s[i], s[i + 1], step=step) for i in range(len(s) - 1))


def trace_non_increasing(trace):
    costs = [c for _, c in trace]
    return all(b <= a for a, b in zip(costs, costs[1:]))


# --- radius and neighbor count --------------------------------------------------


def test_rewiring_radius_examples():
    assert rewiring_radius(10, 2, 1.0) == pytest.approx(math.sqrt(math.log(10) / 10), abs=1e-12)
    assert rewiring_radius(10, 2, 1.0) == pytest.approx(0.4799, abs=1e-4)
    radii = [rewiring_radius(n, 3, 7.0) for n in range(3, 2000)]
    assert all(b <= a for a, b in zip(radii, radii[1:]))
    assert rewiring_radius(10, 2, 1e9, eta=5.0) == 5.0


def test_prm_star_k_examples():
    assert prm_star_k(100, 2) == 19
    assert prm_star_k(2, 3) == 3
    ks = [prm_star_k(n, 2) for n in range(2, 5000)]
    assert all(b >= a for a, b in zip(ks, ks[1:]))


# --- informed sampling ----------------------------------------------------------


def test_informed_sample_degenerate_ellipse_is_the_segment():
    sp = StateSpace(SpaceKind.SE2, SMALL)
    start, goal = np.array([-5.0, -3.0, 0.0]), np.array([4.0, 6.0, 1.0])
    c_min = float(np.hypot(9, 9))
    rng = seeded(1)
    for _ in range(1000):
        p = informed_sample(start, goal, c_min, sp, rng)[:2]
        d = np.hypot(*(p - start[:2])) + np.hypot(*(p - goal[:2]))
        assert d <= c_min + 1e-9


def test_informed_sample_infinite_cost_is_uniform():
    sp = StateSpace(SpaceKind.SE3, SMALL)
    a, b = seeded(3), seeded(3)
    for _ in range(100):
        assert np.array_equal(informed_sample([0, 0, 1, 1, 0, 0, 0], [5, 5, 1, 1, 0, 0, 0], math.inf, sp, a),
                              sp.sample_uniform(b))


@pytest.mark.parametrize("kind", [SpaceKind.SE2, SpaceKind.SE3])
def test_informed_sample_containment(kind):
    sp = StateSpace(kind, SMALL)
    if kind is SpaceKind.SE3:
        start, goal = np.array([-6.0, 0, 0.5, 1, 0, 0, 0]), np.array([6.0, 2, 1.5, 1, 0, 0, 0])
    else:
        start, goal = np.array([-6.0, 0, 0]), np.array([6.0, 2, 0])
    pa, pb = sp.position(start), sp.position(goal)
    c_best = 1.3 * np.linalg.norm(pb - pa)
    rng = seeded(4)
    for _ in range(10_000):
        s = informed_sample(start, goal, c_best, sp, rng)
        p = sp.position(s)
        assert np.linalg.norm(p - pa) + np.linalg.norm(p - pb) <= c_best + 1e-9
        assert sp.satisfies_bounds(s)


def test_informed_sample_rejects_cost_below_distance():
    sp = StateSpace(SpaceKind.SE2, SMALL)
    with pytest.raises(ValueError):
        informed_sample([0, 0, 0], [5, 0, 0], 4.0, sp, seeded(0))


# --- shared planner contract ------------------------------------------------------


@pytest.mark.parametrize("name", sorted(PLANNERS))
def test_every_planner_is_sound_and_status_matches_tolerance(name, wall_problem):
    params = PlannerParams(workers=2)
    # FMT* counts node expansions, so the budget must exceed its 2002 nodes
    res = PLANNERS[name](wall_problem, Budget.iterations(3000), params, seeded(8))
    assert res.status is Status.EXACT
    assert wall_problem.reaches_goal(res.path.end)
    assert np.array_equal(res.path.start, wall_problem.start)
    assert dense_valid(wall_problem, res.path)
    assert trace_non_increasing(res.cost_trace)
    assert res.cost == pytest.approx(path_cost(wall_problem.space, res.path.states), rel=1e-9)


@pytest.mark.parametrize("name", sorted(PLANNERS))
def test_sealed_goal_is_never_exact(name, sealed_problem):
    res = PLANNERS[name](sealed_problem, Budget.iterations(1500), PlannerParams(workers=2), seeded(9))
    assert res.status is not Status.EXACT
    if res.status is Status.APPROXIMATE:
        assert not sealed_problem.reaches_goal(res.path.end)
        assert dense_valid(sealed_problem, res.path)
    else:
        assert res.path is None


@pytest.mark.parametrize("name", sorted(PLANNERS))
def test_iteration_budget_is_deterministic(name, wall_problem):
    params = PlannerParams(workers=3)
    a = PLANNERS[name](wall_problem, Budget.iterations(3000), params, seeded(11))
    b = PLANNERS[name](wall_problem, Budget.iterations(3000), params, seeded(11))
    assert a.status is b.status
    assert np.array_equal(a.path.states, b.path.states)
    assert [c for _, c in a.cost_trace] == [c for _, c in b.cost_trace]
    assert (a.iterations, a.samples_generated, a.motion_checks) == (b.iterations, b.samples_generated,
                                                                   b.motion_checks)


def test_invalid_start_is_rejected_before_search(wall_problem):
    bad = Problem(wall_problem.space, wall_problem.map, RobotBody(), [0.0, 0.0, 0.0], wall_problem.goal)
    for plan in PLANNERS.values():
        with pytest.raises(InvalidProblemError):
            plan(bad, Budget.iterations(10))


def test_anytime_monotonicity_on_clutter(clutter_problems):
    violations = 0
    for i, pr in enumerate(clutter_problems[:5]):
        for name, plan in PLANNERS.items():
            res = plan(pr, Budget.iterations(600), PlannerParams(workers=2), seeded(i))
            violations += not trace_non_increasing(res.cost_trace)
    assert violations == 0


# --- RRT* -------------------------------------------------------------------------


def test_rrt_star_open_map_one_second(open_problem):
    ratios = []
    for s in SEEDS:
        res = plan_rrt_star(open_problem, Budget.wall_clock(1.0), rng=seeded(s))
        assert res.status is Status.EXACT
        dense = interpolate_path(res.path, 120, open_problem.space)
        ratios.append(path_length(dense, open_problem.space) / 85.0)
    assert np.median(ratios) <= 1.05, f"median length ratio {np.median(ratios):.4f}"


def test_rrt_star_improves_with_more_iterations(open_problem):
    short, long_ = [], []
    for s in SEEDS:
        short.append(plan_rrt_star(open_problem, Budget.iterations(5000), rng=seeded(s)).cost)
        long_.append(plan_rrt_star(open_problem, Budget.iterations(50_000), rng=seeded(s)).cost)
    assert np.median(long_) <= np.median(short)


# --- Informed RRT* ------------------------------------------------------------------


def test_informed_samples_stay_in_the_ellipse_after_first_solution(wall_problem):
    p = wall_problem
    engine = TreeEngine(p, PlannerParams(), seeded(5), Budget.iterations(4000).start(), informed=True)
    pa, pb = p.start[:2], p.goal[:2]
    checked = []

    def hook(s, c_best):
        if math.isfinite(c_best):
            checked.append(np.hypot(*(s[:2] - pa)) + np.hypot(*(s[:2] - pb)) <= c_best + 1e-9)

    engine.sample_hook = hook
    for _ in range(4000):
        engine.step()
    assert engine.solved
    assert len(checked) > 100 and all(checked)


def test_informed_beats_plain_rrt_star_on_open_map(open_problem):
    plain, informed = [], []
    for s in SEEDS:
        plain.append(plan_rrt_star(open_problem, Budget.iterations(20_000), rng=seeded(s)).cost)
        informed.append(plan_informed_rrt_star(open_problem, Budget.iterations(20_000), rng=seeded(s)).cost)
    assert np.median(informed) <= np.median(plain)


def test_informed_without_solution_matches_rrt_star(sealed_problem):
    a = plan_rrt_star(sealed_problem, Budget.iterations(2000), rng=seeded(6))
    b = plan_informed_rrt_star(sealed_problem, Budget.iterations(2000), rng=seeded(6))
    assert a.status is b.status is Status.APPROXIMATE
    assert np.array_equal(a.path.states, b.path.states)
    assert (a.iterations, a.samples_generated, a.motion_checks) == (b.iterations, b.samples_generated,
                                                                   b.motion_checks)


# --- PRM* and LazyPRM* -----------------------------------------------------------------


@pytest.mark.parametrize("plan", [plan_prm_star, plan_lazy_prm_star])
def test_roadmaps_on_open_map(plan, open_problem):
    ratios = []
    for s in SEEDS:
        res = plan(open_problem, Budget.iterations(20_000), rng=seeded(s))
        assert res.status is Status.EXACT
        ratios.append(res.cost / 85.0)
    assert np.median(ratios) <= 1.05


def test_lazy_prm_checks_fewer_motions(wall_problem, clutter_problems, open_problem):
    for pr in [wall_problem, open_problem] + clutter_problems[:3]:
        eager = plan_prm_star(pr, Budget.iterations(1000), rng=seeded(2))
        lazy = plan_lazy_prm_star(pr, Budget.iterations(1000), rng=seeded(2))
        assert lazy.motion_checks < eager.motion_checks


@pytest.mark.parametrize("plan", [plan_prm_star, plan_lazy_prm_star])
def test_disconnected_roadmap_fails(plan, sealed_problem):
    res = plan(sealed_problem, Budget.iterations(1500), rng=seeded(3))
    assert res.status is Status.FAILURE and res.path is None


# --- FMT* -------------------------------------------------------------------------------


def test_fmt_open_map_mostly_exact(open_problem):
    exact = sum(plan_fmt_star(open_problem, Budget.wall_clock(30.0), rng=seeded(s)).status is Status.EXACT
                for s in SEEDS)
    assert exact >= 19


def test_fmt_goal_within_one_radius_is_a_single_edge(empty_octree, se2_small):
    pr = Problem(se2_small, empty_octree, RobotBody(), [0.0, 0.0, 0.0], [1.0, 0.5, 0.2])
    res = plan_fmt_star(pr, Budget.wall_clock(10.0), rng=seeded(0))
    assert res.status is Status.EXACT
    assert len(res.path) == 2


def test_fmt_needs_two_samples():
    with pytest.raises(ValueError):
        PlannerParams(num_samples=1)


# --- CForest ----------------------------------------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_single_worker_cforest_reduces_to_informed_pruned_rrt_star(seed, wall_problem):
    params = PlannerParams(workers=1)
    forest = plan_cforest(wall_problem, Budget.iterations(2000), params, seeded(seed))
    tree = _run(wall_problem, Budget.iterations(2000), params, seeded(seed).spawn(1)[0], "RRTstar",
                informed=True, prune=True)
    assert forest.status is tree.status
    assert np.array_equal(forest.path.states, tree.path.states)
    assert [c for _, c in forest.cost_trace] == [c for _, c in tree.cost_trace]
    assert forest.iterations == tree.iterations


def test_cforest_threads_share_one_monotone_trace(wall_problem):
    res = plan_cforest(wall_problem, Budget.wall_clock(0.5), PlannerParams(workers=4), seeded(1))
    assert res.status is Status.EXACT
    assert trace_non_increasing(res.cost_trace)
    assert dense_valid(wall_problem, res.path)


# --- APS ---------------------------------------------------------------------------------


def test_single_worker_aps_never_longer_than_raw_rrt_star(open_problem):
    params = PlannerParams(workers=1)
    for s in range(5):
        aps = plan_aps(open_problem, Budget.iterations(3000), params, seeded(s))
        raw = plan_rrt_star(open_problem, Budget.iterations(3000), params, seeded(s).spawn(1)[0])
        assert aps.status is raw.status is Status.EXACT
        assert path_length(aps.path, open_problem.space) <= path_length(raw.path, open_problem.space) + 1e-9


def test_aps_smooths_cluttered_paths(clutter_problems):
    params = PlannerParams(workers=1)
    final, raw = [], []
    for s, pr in enumerate(clutter_problems):
        a = plan_aps(pr, Budget.iterations(3000), params, seeded(s))
        r = plan_rrt_star(pr, Budget.iterations(3000), params, seeded(s).spawn(1)[0])
        if a.status is Status.EXACT and r.status is Status.EXACT:
            final.append(path_smoothness(a.path))
            raw.append(path_smoothness(r.path))
    assert len(final) >= 10
    assert np.median(final) <= np.median(raw)


def test_aps_without_solution_fails(sealed_problem):
    res = plan_aps(sealed_problem, Budget.iterations(1000), PlannerParams(workers=2), seeded(0))
    assert res.status is Status.FAILURE and res.path is None


# --- path post-processing --------------------------------------------------------------------


def test_shortcut_keeps_straight_path(empty_octree, se2_small):
    pr = Problem(se2_small, empty_octree, RobotBody(), [-5.0, 0.0, 0.0], [5.0, 0.0, 0.0])
    path = Path(np.array([pr.start, pr.goal]), SpaceKind.SE2)
    out = shortcut_simplify(path, pr, 50, seeded(0))
    assert np.array_equal(out.states, path.states)


def test_shortcut_collapses_a_detour(empty_octree, se2_small):
    pr = Problem(se2_small, empty_octree, RobotBody(), [-5.0, 0.0, 0.0], [5.0, 0.0, 0.0])
    path = Path(np.array([pr.start, [-5.0, 5.0, 0.0], [5.0, 5.0, 0.0], pr.goal]), SpaceKind.SE2)
    out = shortcut_simplify(path, pr, 200, seeded(0))
    before, after = path_length(path, se2_small), path_length(out, se2_small)
    assert after < before
    assert after < 0.8 * before
    assert np.array_equal(out.start, path.start) and np.array_equal(out.end, path.end)


def _random_valid_path(sp, chk, rng):
    while True:
        s = sp.sample_uniform(rng)
        if chk.is_state_valid(s):
            break
    states = [s]
    while len(states) < rng.integers(3, 8):
        nxt = states[-1].copy()
        nxt[:2] += rng.uniform(-4, 4, 2)
        nxt[2] = rng.uniform(-math.pi, math.pi)
        if sp.satisfies_bounds(nxt) and chk.is_motion_valid(states[-1], nxt):
            states.append(nxt)
    return Path(np.array(states), sp.kind)


def test_shortcut_property_sweep(clutter_problems):
    pr = clutter_problems[0]
    sp = pr.space
    chk = pr.checker()
    rng = seeded(10)
    for _ in range(1000):
        path = _random_valid_path(sp, chk, rng)
        out = shortcut_simplify(path, pr, 20, rng, chk)
        assert path_length(out, sp) <= path_length(path, sp) + 1e-9
        assert np.array_equal(out.start, path.start) and np.array_equal(out.end, path.end)
        assert all(chk.is_motion_valid(out.states[i], out.states[i + 1]) for i in range(len(out) - 1))


def test_interpolate_examples(se2_small):
    path = Path(np.array([[0.0, 0, 0], [10.0, 0, 0]]), SpaceKind.SE2)
    two = interpolate_path(path, 2, se2_small)
    assert np.array_equal(two.states, path.states)
    dense = interpolate_path(path, 120, se2_small)
    assert len(dense) == 120
    assert np.allclose(np.diff(dense.states[:, 0]), 10 / 119, atol=1e-12)
    with pytest.raises(ValueError):
        interpolate_path(path, 1, se2_small)


def test_interpolate_preserves_polyline_length(se2_small):
    rng = seeded(12)
    for _ in range(50):
        # uneven vertices along one straight line, heading fixed
        direction = rng.normal(size=2)
        direction /= np.linalg.norm(direction)
        t = np.sort(rng.uniform(-8, 8, int(rng.integers(2, 9))))
        pts = np.column_stack([t * direction[0], t * direction[1], np.full(len(t), rng.uniform(-3, 3))])
        path = Path(pts, SpaceKind.SE2)
        out = interpolate_path(path, int(rng.integers(2, 300)), se2_small)
        assert path_length(out, se2_small) == pytest.approx(path_length(path, se2_small), abs=1e-6)
        assert np.array_equal(out.start, path.start) and np.array_equal(out.end, path.end)


def test_interpolate_never_lengthens_a_bent_polyline(se2_small):
    rng = seeded(14)
    for _ in range(50):
        pts = rng.uniform(-9, 9, size=(int(rng.integers(3, 9)), 3))
        path = Path(pts, SpaceKind.SE2)
        out = interpolate_path(path, int(rng.integers(2, 300)), se2_small)
        # resampled points cut the corners between them
        assert path_length(out, se2_small) <= path_length(path, se2_small) + 1e-9


# --- nearest-neighbor index ---------------------------------------------------------------------


@pytest.mark.parametrize("kind", list(SpaceKind))
def test_nearest_index_matches_brute_force(kind):
    sp = StateSpace(kind, SMALL, min_turning_radius=1.5)
    rng = seeded(13)
    pts = np.array([sp.sample_uniform(rng) for _ in range(1500)])
    idx = NearestIndex(sp)
    idx.add_many(pts[:700])
    for p in pts[700:]:
        idx.add(p)
    for q in (sp.sample_uniform(rng) for _ in range(40)):
        to_q = np.array([sp.distance(p, q) for p in pts])
        from_q = np.array([sp.distance(q, p) for p in pts])
        for direction, d in (("to", to_q), ("from", from_q)):
            got, dist = idx.within(q, 3.0, direction)
            assert set(got.tolist()) == set(np.flatnonzero(d <= 3.0).tolist())
            assert np.allclose(dist, d[got])
            k_idx, k_d = idx.k_nearest(q, 7, direction)
            assert np.allclose(k_d, np.sort(d)[:7])
    with pytest.raises(ValueError):
        idx.within(pts[0], 1.0, "sideways")
