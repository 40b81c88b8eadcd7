"""YAML benchmark configuration."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields
from typing import Any

import yaml

from ..planners import PLANNERS, canonical_planner_name
from ..statespace import Bounds, SpaceKind
from ..worldmap.scene import BoxObstacle, CylinderObstacle, FlatGround, HeightField, SceneSpec

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid benchmark configuration; the message starts with the offending key path."""


# planners listed among the evaluated optimizing planners that this package does not provide
UNSUPPORTED_PLANNERS = {
    "RRTSHARP", "RRT#", "RRTX", "BIT*", "BITSTAR", "ABIT*", "ABITSTAR", "AIT*", "AITSTAR", "LBTRRT", "SST", "SPARS",
    "SPARSTWO", "SPARS2",
}

IGNORED_KEYS = ("octomap_topic", "visualize_a_sample_benchmark", "sample_benchmark_plans_topic")

_BOUND_KEYS = ("minx", "maxx", "miny", "maxy", "minz", "maxz", "minyaw", "maxyaw")


@dataclass(frozen=True)
class RandomSceneParams:
    houses: int = 48
    posts: int = 60
    plants: int = 120


@dataclass(frozen=True)
class SceneConfig:
    """Scene description from the ``scene:`` block; extent and resolution come from the main config."""

    seed: int | None = None
    ground: Any = field(default_factory=FlatGround)
    obstacles: tuple = ()
    random: RandomSceneParams | None = None
    corridor_width: float | None = None
    max_retries: int = 50


@dataclass(frozen=True)
class BenchmarkConfig:
    planner_timeout: float = 1.0
    interpolation_parameter: int = 120
    octomap_topic: str = "octomap"
    octomap_voxel_size: float = 0.2
    selected_state_space: SpaceKind = SpaceKind.SE2
    selected_planners: tuple = tuple(PLANNERS)
    min_turning_radius: float = 1.5
    state_space_boundries: Bounds = field(default_factory=Bounds)
    robot_body_dimens: tuple = (1.5, 1.5, 0.5)
    goal_tolerance: float = 0.2
    min_euclidean_dist_start_to_goal: float = 65.0
    epochs: int = 20
    batch_size: int = 5
    max_memory: float = 4096.0
    results_output_file: str = "result.log"
    visualize_a_sample_benchmark: bool = False
    sample_benchmark_plans_topic: str = "benchmark_plan"
    # extensions
    scene: SceneConfig | None = None
    map_file: str | None = None
    master_seed: int = 0
    precheck_timeout: float = 10.0
    ground_truth_timeout: float = 30.0
    planner_iterations: int = 2000
    precheck_iterations: int = 20000
    ground_truth_iterations: int = 30000

    @property
    def bounds(self) -> Bounds:
        return self.state_space_boundries

    def scene_spec(self, seed_override: int | None = None) -> SceneSpec:
        """Scene spec for this config (a default random scene when none is given)."""
        sc = self.scene or SceneConfig(random=RandomSceneParams())
        seed = seed_override if seed_override is not None else (sc.seed if sc.seed is not None else self.master_seed)
        corridor = sc.corridor_width if sc.corridor_width is not None else self.robot_body_dimens[1]
        obstacles = tuple(sc.obstacles)
        if sc.random is not None:
            from ..worldmap.scene import random_scene_spec

            rnd = random_scene_spec(seed, self.bounds, sc.random.houses, sc.random.posts, sc.random.plants,
                                    resolution=self.octomap_voxel_size)
            obstacles = obstacles + rnd.obstacles
        return SceneSpec(ground=sc.ground, obstacles=obstacles, extent=self.bounds, seed=seed,
                         resolution=self.octomap_voxel_size, corridor_width=corridor, max_retries=sc.max_retries)


# ---------------------------------------------------------------------------
# value coercion with key paths


def _number(v, path, positive=False, allow_zero=True) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{path}: must be finite")
    if positive and (v < 0 or (v == 0 and not allow_zero)):
        raise ConfigError(f"{path}: must be {'positive' if not allow_zero else 'non-negative'}, got {v}")
    return v


def _integer(v, path, minimum=None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        else:
            raise ConfigError(f"{path}: expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {v}")
    return int(v)


def _string(v, path) -> str:
    if not isinstance(v, str):
        raise ConfigError(f"{path}: expected a string, got {v!r}")
    return v


def _boolean(v, path) -> bool:
    if not isinstance(v, bool):
        raise ConfigError(f"{path}: expected true or false, got {v!r}")
    return v


def _mapping(v, path, allowed) -> dict:
    if v is None:
        return {}
    if not isinstance(v, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(v).__name__}")
    for k in v:
        if k not in allowed:
            raise ConfigError(f"{path}.{k}: unknown key")
    return v


def _vector(v, path, n) -> tuple:
    if not isinstance(v, (list, tuple)) or len(v) != n:
        raise ConfigError(f"{path}: expected a list of {n} numbers")
    return tuple(_number(x, f"{path}[{i}]") for i, x in enumerate(v))


def _planners(v, path) -> tuple:
    if isinstance(v, str):
        v = [v]
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{path}: expected a non-empty list of planner names")
    out: list[str] = []
    for i, name in enumerate(v):
        if name is Ellipsis or name == "...":
            names = list(PLANNERS)
        else:
            name = _string(name, f"{path}[{i}]")
            if name.strip().upper() in UNSUPPORTED_PLANNERS:
                raise ConfigError(f"{path}[{i}]: planner {name!r} is not implemented")
            try:
                names = [canonical_planner_name(name)]
            except KeyError as exc:
                raise ConfigError(f"{path}[{i}]: {exc.args[0]}") from None
        for nm in names:
            if nm not in out:
                out.append(nm)
    return tuple(out)


def _bounds(v, path) -> Bounds:
    m = _mapping(v, path, _BOUND_KEYS)
    vals = {k: _number(m[k], f"{path}.{k}") if k in m else getattr(Bounds(), k) for k in _BOUND_KEYS}
    for lo, hi in (("minx", "maxx"), ("miny", "maxy"), ("minz", "maxz"), ("minyaw", "maxyaw")):
        if vals[lo] > vals[hi]:
            raise ConfigError(f"{path}.{lo}: must not exceed {hi}")
    for lo, hi in (("minx", "maxx"), ("miny", "maxy")):
        if vals[lo] == vals[hi]:
            raise ConfigError(f"{path}.{lo}: x and y ranges must have positive width")
    return Bounds(**vals)


def _body(v, path) -> tuple:
    if isinstance(v, (list, tuple)):
        dims = _vector(v, path, 3)
    else:
        m = _mapping(v, path, ("x", "y", "z"))
        dims = tuple(_number(m.get(k, d), f"{path}.{k}") for k, d in zip("xyz", (1.5, 1.5, 0.5)))
    for k, d in zip("xyz", dims):
        if not d > 0:
            raise ConfigError(f"{path}.{k}: must be positive")
    return dims


def _scene(v, path) -> SceneConfig:
    m = _mapping(v, path, ("seed", "ground", "obstacles", "random", "corridor_width", "max_retries"))
    seed = _integer(m["seed"], f"{path}.seed", 0) if "seed" in m else None
    ground: Any = FlatGround()
    g = m.get("ground", "flat")
    if g == "flat" or g is None:
        ground = FlatGround()
    elif isinstance(g, dict):
        gm = _mapping(g, f"{path}.ground", ("height_field", "flat"))
        if "height_field" in gm:
            hf = _mapping(gm["height_field"], f"{path}.ground.height_field", ("amplitude", "wavelength"))
            amp = _number(hf.get("amplitude", 0.5), f"{path}.ground.height_field.amplitude", positive=True)
            wl = _number(hf.get("wavelength", 20.0), f"{path}.ground.height_field.wavelength", positive=True,
                         allow_zero=False)
            ground = HeightField(amp, wl)
    else:
        raise ConfigError(f"{path}.ground: expected 'flat' or a height_field mapping")
    obstacles = []
    raw_obs = m.get("obstacles") or []
    if not isinstance(raw_obs, list):
        raise ConfigError(f"{path}.obstacles: expected a list")
    for i, ob in enumerate(raw_obs):
        p = f"{path}.obstacles[{i}]"
        om = _mapping(ob, p, ("box", "cylinder"))
        if len(om) != 1:
            raise ConfigError(f"{p}: expected exactly one of box or cylinder")
        if "box" in om:
            bm = _mapping(om["box"], f"{p}.box", ("center", "extents"))
            ext = _vector(bm.get("extents"), f"{p}.box.extents", 3)
            if min(ext) <= 0:
                raise ConfigError(f"{p}.box.extents: must be positive")
            obstacles.append(BoxObstacle(_vector(bm.get("center"), f"{p}.box.center", 3), ext))
        else:
            cm = _mapping(om["cylinder"], f"{p}.cylinder", ("center", "radius", "height"))
            obstacles.append(CylinderObstacle(
                _vector(cm.get("center"), f"{p}.cylinder.center", 2),
                _number(cm.get("radius"), f"{p}.cylinder.radius", positive=True, allow_zero=False),
                _number(cm.get("height"), f"{p}.cylinder.height", positive=True, allow_zero=False),
            ))
    rnd = None
    if "random" in m:
        rm = _mapping(m["random"], f"{path}.random", ("houses", "posts", "plants"))
        rnd = RandomSceneParams(**{k: _integer(rm[k], f"{path}.random.{k}", 0) for k in rm})
    corridor = (_number(m["corridor_width"], f"{path}.corridor_width", positive=True)
                if "corridor_width" in m else None)
    retries = _integer(m.get("max_retries", 50), f"{path}.max_retries", 0)
    return SceneConfig(seed, ground, tuple(obstacles), rnd, corridor, retries)


def _space(v, path) -> SpaceKind:
    name = _string(v, path).strip().upper()
    aliases = {"SE2": "SE2", "SE3": "SE3", "DUBINS": "DUBINS", "REEDS": "REEDS", "REEDS_SHEPP": "REEDS",
               "REEDSSHEPP": "REEDS"}
    if name not in aliases:
        raise ConfigError(f"{path}: unknown state space {v!r}; options are SE2, SE3, DUBINS, REEDS")
    return SpaceKind(aliases[name])


_PARSERS = {
    "planner_timeout": lambda v, p: _number(v, p, positive=True, allow_zero=False),
    "interpolation_parameter": lambda v, p: _integer(v, p, 2),
    "octomap_topic": _string,
    "octomap_voxel_size": lambda v, p: _number(v, p, positive=True, allow_zero=False),
    "selected_state_space": _space,
    "selected_planners": _planners,
    "min_turning_radius": lambda v, p: _number(v, p, positive=True, allow_zero=False),
    "state_space_boundries": _bounds,
    "robot_body_dimens": _body,
    "goal_tolerance": lambda v, p: _number(v, p, positive=True, allow_zero=False),
    "min_euclidean_dist_start_to_goal": lambda v, p: _number(v, p, positive=True),
    "epochs": lambda v, p: _integer(v, p, 1),
    "batch_size": lambda v, p: _integer(v, p, 1),
    "max_memory": lambda v, p: _number(v, p, positive=True, allow_zero=False),
    "results_output_file": _string,
    "visualize_a_sample_benchmark": _boolean,
    "sample_benchmark_plans_topic": _string,
    "scene": _scene,
    "map_file": _string,
    "master_seed": lambda v, p: _integer(v, p, 0),
    "precheck_timeout": lambda v, p: _number(v, p, positive=True, allow_zero=False),
    "ground_truth_timeout": lambda v, p: _number(v, p, positive=True, allow_zero=False),
    "planner_iterations": lambda v, p: _integer(v, p, 1),
    "precheck_iterations": lambda v, p: _integer(v, p, 1),
    "ground_truth_iterations": lambda v, p: _integer(v, p, 1),
}

assert set(_PARSERS) == {f.name for f in fields(BenchmarkConfig)}


def parse_config(text: str) -> BenchmarkConfig:
    """Parse YAML text into a validated :class:`BenchmarkConfig`."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"<document>: YAML syntax error: {exc}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("<document>: top level must be a mapping")
    values = {}
    for key, raw in doc.items():
        if key not in _PARSERS:
            raise ConfigError(f"{key}: unknown key")
        values[key] = _PARSERS[key](raw, key)
        if key in IGNORED_KEYS:
            log.warning("config key %r is accepted but has no effect here", key)
    if "map_file" in values and "scene" in values:
        raise ConfigError("map_file: give either map_file or scene, not both")
    cfg = BenchmarkConfig(**values)
    b = cfg.bounds
    diag = math.hypot(b.maxx - b.minx, b.maxy - b.miny)
    if cfg.selected_state_space is SpaceKind.SE3:
        diag = math.hypot(diag, b.maxz - b.minz)
    if not cfg.min_euclidean_dist_start_to_goal < diag:
        raise ConfigError(
            f"min_euclidean_dist_start_to_goal: {cfg.min_euclidean_dist_start_to_goal} must be below the bounds "
            f"diagonal {diag:.3f}"
        )
    return cfg


def load_config(path) -> BenchmarkConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"<file>: cannot read {path}: {exc}") from None
    return parse_config(text)
