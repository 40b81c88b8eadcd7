import re
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_report  # noqa: E402
from sbobench import warmup  # noqa: E402
from sbobench.collision import RobotBody  # noqa: E402
from sbobench.statespace import Bounds, SpaceKind, StateSpace  # noqa: E402
from sbobench.worldmap import BoxObstacle, SceneSpec, build_octree, generate_scene  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def _compiled_kernels():
    warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


SMALL_BOUNDS = Bounds(-10.0, 10.0, -10.0, 10.0, 0.0, 2.0)


@pytest.fixture(scope="session")
def empty_octree():
    return build_octree(np.zeros((0, 3), dtype=np.int64), 0.2, (-10.0, -10.0, -0.2))


@pytest.fixture(scope="session")
def wall_scene():
    """20 x 20 m world with a wall across x = 0 that leaves a gap near y = 8."""
    spec = SceneSpec(
        extent=SMALL_BOUNDS,
        obstacles=(BoxObstacle((0.0, -2.0, 1.0), (1.0, 16.0, 2.0)),),
        seed=3,
        corridor_width=1.5,
    )
    return generate_scene(spec)


@pytest.fixture
def se2_small():
    return StateSpace(SpaceKind.SE2, SMALL_BOUNDS)


@pytest.fixture
def body():
    return RobotBody()


# --- acceptance report --------------------------------------------------------

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")
_ACCEPTANCE_OUTCOMES: dict[int, str] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m and (report.when == "call" or report.failed):
        n = int(m.group(1))
        if _ACCEPTANCE_OUTCOMES.get(n) != "failed":
            _ACCEPTANCE_OUTCOMES[n] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_OUTCOMES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_ACCEPTANCE_OUTCOMES):
        verdict = "PASS" if _ACCEPTANCE_OUTCOMES[n] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {verdict}  {acceptance_report.DETAILS.get(n, '')}".rstrip())
