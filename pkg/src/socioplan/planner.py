"""Optimal path search on a costmap, plus the assess-then-plan iteration that
resolves the circular dependency between trajectory and relevance."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

from .cost_assessment import Assessment, AssessorPort, assess
from .cost_field import (
    Costmap,
    Vec2,
    field_spec_from_assessment,
    make_activity_zones,
    rasterize,
)
from .human_augmentation import Condition, derive_condition_variant
from .scene_graph import SceneGraph
from .trajectory_context import (
    DEFAULT_WAYPOINT_SPACING_M,
    Trajectory,
    induce_partial_graph,
    relevant_objects,
)

SQRT2 = math.sqrt(2.0)
DEFAULT_MAX_ROUNDS = 3

_NEIGHBORS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)


class PlanningError(ValueError):
    """Planning could not run or the request was invalid."""


@dataclass(frozen=True)
class PlanRequest:
    start: Vec2
    goal: Vec2
    costmap: Costmap

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", tuple(float(c) for c in self.start))
        object.__setattr__(self, "goal", tuple(float(c) for c in self.goal))


@dataclass(frozen=True)
class Path:
    """8-connected grid path with its world polyline and exact cost."""

    cells: tuple[tuple[int, int], ...]
    polyline: tuple[Vec2, ...]
    total_cost: float
    length_m: float


def _step_weight(costmap: Costmap, a: tuple[int, int], b: tuple[int, int]) -> float:
    # Step weight = step length (meters) x mean of the two endpoint cell costs.
    length = costmap.resolution * (SQRT2 if a[0] != b[0] and a[1] != b[1] else 1.0)
    return length * ((costmap.value(*a) + costmap.value(*b)) / 2.0)


def path_cost(path: "Path | Sequence[tuple[int, int]]", costmap: Costmap) -> float:
    """Recompute a path's total cost from its cells; 0 for single-cell paths."""
    cells = path.cells if isinstance(path, Path) else tuple(tuple(c) for c in path)
    total = 0.0
    for cell in cells:
        ix, iy = cell
        if not (0 <= ix < costmap.width and 0 <= iy < costmap.height):
            raise PlanningError(f"cell {cell} lies outside the costmap")
    for a, b in zip(cells, cells[1:]):
        if max(abs(a[0] - b[0]), abs(a[1] - b[1])) != 1:
            raise PlanningError(f"cells {a} and {b} are not 8-adjacent")
        total += _step_weight(costmap, a, b)
    return total


def plan(request: PlanRequest) -> Path:
    """Minimum-total-cost 8-connected path from start to goal.

    A* with the admissible heuristic "Euclidean distance x global minimum
    cell cost (= 1 by the costmap invariant)". Nodes are reopened whenever a
    cheaper route appears, and ties break deterministically on
    (f, h, cell index), so results are exact optima and platform-stable.
    """
    costmap = request.costmap
    try:
        start = costmap.cell_at(request.start)
        goal = costmap.cell_at(request.goal)
    except ValueError as exc:
        raise PlanningError(str(exc)) from exc

    if start == goal:
        return Path(
            cells=(start,),
            polyline=(costmap.cell_center(*start),),
            total_cost=0.0,
            length_m=0.0,
        )

    width, height = costmap.width, costmap.height
    resolution = costmap.resolution

    def heuristic(cell: tuple[int, int]) -> float:
        dx = cell[0] - goal[0]
        dy = cell[1] - goal[1]
        return resolution * math.sqrt(dx * dx + dy * dy)

    def index(cell: tuple[int, int]) -> int:
        return cell[1] * width + cell[0]

    g: dict[tuple[int, int], float] = {start: 0.0}
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    h0 = heuristic(start)
    frontier: list[tuple[float, float, int, tuple[int, int], float]] = [
        (h0, h0, index(start), start, 0.0)
    ]
    goal_reached = False
    while frontier:
        _, _, _, cell, g_pushed = heapq.heappop(frontier)
        if g_pushed > g.get(cell, math.inf):
            continue  # stale entry
        if cell == goal:
            goal_reached = True
            break
        for dx, dy in _NEIGHBORS:
            nx, ny = cell[0] + dx, cell[1] + dy
            if not (0 <= nx < width and 0 <= ny < height):
                continue
            neighbor = (nx, ny)
            tentative = g[cell] + _step_weight(costmap, cell, neighbor)
            if tentative < g.get(neighbor, math.inf):
                g[neighbor] = tentative
                parent[neighbor] = cell
                h = heuristic(neighbor)
                heapq.heappush(frontier, (tentative + h, h, index(neighbor), neighbor, tentative))
    if not goal_reached:
        raise PlanningError("no path from start to goal")  # unreachable on all-finite maps

    cells = [goal]
    while cells[-1] != start:
        cells.append(parent[cells[-1]])
    cells.reverse()
    ordered = tuple(cells)
    length = sum(
        resolution * (SQRT2 if a[0] != b[0] and a[1] != b[1] else 1.0)
        for a, b in zip(ordered, ordered[1:])
    )
    return Path(
        cells=ordered,
        polyline=tuple(costmap.cell_center(*c) for c in ordered),
        total_cost=path_cost(ordered, costmap),
        length_m=length,
    )


@dataclass(frozen=True)
class PlanIteration:
    """Result of the assess-then-plan loop for one condition."""

    path: Path
    assessment: Assessment
    rounds: int
    relevant: tuple[str, ...]
    costmap: Costmap
    partial: SceneGraph


def iterate_plan(
    graph: SceneGraph,
    condition: Condition,
    start: Vec2,
    goal: Vec2,
    radius: float,
    assessor: AssessorPort,
    *,
    bounds: tuple[Vec2, Vec2],
    resolution: float,
    preferences: Sequence[str] = (),
    falloff: str = "linear",
    activity_zones: dict[str, tuple[float, float]] | None = None,
    keep_spatial: bool = False,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    waypoint_spacing: float = DEFAULT_WAYPOINT_SPACING_M,
) -> PlanIteration:
    """Alternate relevance extraction, assessment, and planning to a fixed point.

    Round 1 seeds relevance with the straight start-goal segment; every round
    re-extracts the relevant set from the latest path and replans. The loop
    stops when the relevant set repeats or ``max_rounds`` is reached. The set
    handed to the assessor is the partial graph's node set (radius hits plus
    attached humans), so human context is never dropped.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    variant = derive_condition_variant(graph, condition, keep_spatial=keep_spatial)
    trajectory = Trajectory(
        ((start[0], start[1], 0.0), (goal[0], goal[1], 0.0))
    )
    previous: tuple[str, ...] | None = None
    outcome: PlanIteration | None = None
    rounds = 0
    while rounds < max_rounds:
        ids = relevant_objects(variant, trajectory, radius, max_spacing=waypoint_spacing)
        if previous is not None and ids == previous:
            break
        partial = induce_partial_graph(variant, ids)
        assessed = ids + tuple(i for i in sorted(partial.nodes) if i not in set(ids))
        assessment = assess(assessor, partial, trajectory, assessed, preferences)
        spec = field_spec_from_assessment(partial, assessment, falloff)
        zones = make_activity_zones(partial, activity_zones or {})
        costmap = rasterize(spec, zones, bounds, resolution)
        path = plan(PlanRequest(start=start, goal=goal, costmap=costmap))
        trajectory = Trajectory(tuple((x, y, 0.0) for x, y in path.polyline))
        rounds += 1
        previous = ids
        outcome = PlanIteration(
            path=path,
            assessment=assessment,
            rounds=rounds,
            relevant=assessed,
            costmap=costmap,
            partial=partial,
        )
    assert outcome is not None
    return outcome
