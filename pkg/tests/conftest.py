from __future__ import annotations

import heapq
import math
from pathlib import Path

import numpy as np
import pytest

from socioplan import (
    Condition,
    HumanSpec,
    ObjectNode,
    Relation,
    RelationKind,
    SceneGraph,
    insert_human,
)
from socioplan.cost_field import Costmap

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def bedroom_scene_text() -> str:
    return (DATA_DIR / "bedroom_scene.json").read_text(encoding="utf-8")


def make_small_scene() -> SceneGraph:
    """Three-object room: bed, tv, armchair, one static relation."""
    return SceneGraph(
        nodes=[
            ObjectNode("bed", "bed", (1.0, 3.8, 0.3), (1.6, 2.0, 0.6),
                       affordances={"sit", "lie on"}),
            ObjectNode("tv", "tv", (3.0, 4.85, 1.2), (1.2, 0.2, 0.7),
                       affordances={"watch"}),
            ObjectNode("armchair", "armchair", (3.0, 1.0, 0.45), (0.8, 0.8, 0.9),
                       affordances={"sit"}),
        ],
        relations=[Relation("next to", "armchair", "bed", RelationKind.SPATIAL)],
    )


def make_seated_human_spec() -> HumanSpec:
    return HumanSpec(
        id="human_1",
        bbox_center=(1.0, 3.5, 0.75),
        bbox_extent=(0.5, 0.5, 0.9),
        spatial_relations=(("sitting on", "bed"),),
        activity_relations=(("watching", "tv"),),
    )


@pytest.fixture
def small_scene() -> SceneGraph:
    return make_small_scene()


@pytest.fixture
def scene_with_human() -> SceneGraph:
    return insert_human(make_small_scene(), make_seated_human_spec())


def uniform_costmap(width: int, height: int, resolution: float = 1.0, cost: float = 1.0) -> Costmap:
    return Costmap(
        origin=(0.0, 0.0),
        resolution=resolution,
        width=width,
        height=height,
        cells=np.full((height, width), float(cost)),
    )


def random_costmap(rng: np.random.Generator, max_side: int = 20, resolution: float = 0.5) -> Costmap:
    width = int(rng.integers(2, max_side + 1))
    height = int(rng.integers(2, max_side + 1))
    cells = rng.uniform(1.0, 10.0, size=(height, width))
    return Costmap(origin=(0.0, 0.0), resolution=resolution, width=width, height=height, cells=cells)


def dijkstra_optimum(costmap: Costmap, start: tuple[int, int], goal: tuple[int, int]) -> float:
    """Independent oracle: textbook Dijkstra over the 8-connected grid with
    step weight = step length x mean endpoint cell cost."""
    width, height = costmap.width, costmap.height
    resolution = costmap.resolution
    cells = costmap.cells
    dist: dict[tuple[int, int], float] = {start: 0.0}
    done: set[tuple[int, int]] = set()
    queue: list[tuple[float, tuple[int, int]]] = [(0.0, start)]
    while queue:
        d, u = heapq.heappop(queue)
        if u in done:
            continue
        done.add(u)
        if u == goal:
            return d
        ux, uy = u
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                vx, vy = ux + dx, uy + dy
                if not (0 <= vx < width and 0 <= vy < height):
                    continue
                step = resolution * math.sqrt(2.0) if dx != 0 and dy != 0 else resolution
                weight = step * ((cells[uy, ux] + cells[vy, vx]) / 2.0)
                nd = d + weight
                if nd < dist.get((vx, vy), math.inf):
                    dist[(vx, vy)] = nd
                    heapq.heappush(queue, (nd, (vx, vy)))
    return math.inf


# Re-exported so tests can parametrize over conditions without imports noise.
ALL_CONDITIONS = (
    Condition.NO_HUMAN,
    Condition.HUMAN_NO_RELATIONS,
    Condition.HUMAN_WITH_RELATIONS,
)


# --- acceptance reporting -------------------------------------------------
# Tests marked @pytest.mark.acceptance(label=...) get one PASS/FAIL line in
# the terminal summary.

def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(label): acceptance criterion with a summary line"
    )
    config._acceptance_lines = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label = marker.kwargs.get("label", item.name)
    verdict = "PASS" if report.passed else "FAIL"
    item.config._acceptance_lines.append(f"ACCEPTANCE {label}: {verdict}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
