"""Planar cost synthesis: per-object contributions with distance falloff,
pointwise-maximum combination, optional activity corridors, and
rasterization into a costmap.

The field value at a point is max over contributions of
``1 + (cost - 1) * falloff(d)`` where ``d`` is the planar distance to the
contribution's footprint (0 on the object). With the default linear law the
contribution equals ``cost`` on the footprint and decays to 1 at the
clearance distance; ``clearance = 0`` means the object only affects points
on its own footprint. Every field value is therefore >= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .scene_graph import ObjectNode, RelationKind, SceneGraph

Vec2 = tuple[float, float]

COSTMAP_TEXT_HEADER = "socioplan costmap v1"


@dataclass(frozen=True)
class RectFootprint:
    """Axis-aligned ground-plane rectangle."""

    min_xy: Vec2
    max_xy: Vec2

    def __post_init__(self) -> None:
        object.__setattr__(self, "min_xy", tuple(float(c) for c in self.min_xy))
        object.__setattr__(self, "max_xy", tuple(float(c) for c in self.max_xy))
        if self.min_xy[0] > self.max_xy[0] or self.min_xy[1] > self.max_xy[1]:
            raise ValueError("footprint min corner must not exceed max corner")

    @property
    def center(self) -> Vec2:
        return (
            (self.min_xy[0] + self.max_xy[0]) / 2.0,
            (self.min_xy[1] + self.max_xy[1]) / 2.0,
        )

    @property
    def sides(self) -> Vec2:
        return (self.max_xy[0] - self.min_xy[0], self.max_xy[1] - self.min_xy[1])

    def distance(self, points: np.ndarray) -> np.ndarray:
        """Planar distance from each (N, 2) point to the rectangle; 0 inside."""
        pts = np.asarray(points, dtype=float)
        dx = np.maximum(np.maximum(self.min_xy[0] - pts[:, 0], 0.0), pts[:, 0] - self.max_xy[0])
        dy = np.maximum(np.maximum(self.min_xy[1] - pts[:, 1], 0.0), pts[:, 1] - self.max_xy[1])
        return np.sqrt(dx * dx + dy * dy)


@dataclass(frozen=True)
class OrientedRectFootprint:
    """Rectangle with an arbitrary in-plane orientation (used for corridors)."""

    center: Vec2
    axis: Vec2  # unit vector along the long side
    half_length: float
    half_width: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        ax, ay = (float(c) for c in self.axis)
        norm = math.hypot(ax, ay)
        if norm == 0.0:
            raise ValueError("axis must be a non-zero vector")
        object.__setattr__(self, "axis", (ax / norm, ay / norm))
        if self.half_length < 0 or self.half_width < 0:
            raise ValueError("half sizes must be >= 0")

    def distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        ux, uy = self.axis
        rx = pts[:, 0] - self.center[0]
        ry = pts[:, 1] - self.center[1]
        along = np.abs(rx * ux + ry * uy)
        across = np.abs(-rx * uy + ry * ux)
        dx = np.maximum(along - self.half_length, 0.0)
        dy = np.maximum(across - self.half_width, 0.0)
        return np.sqrt(dx * dx + dy * dy)


Footprint = RectFootprint | OrientedRectFootprint


def footprint_of(node: ObjectNode) -> RectFootprint:
    """Ground-plane projection of a node's bounding box."""
    lo, hi = node.bbox_min, node.bbox_max
    return RectFootprint((lo[0], lo[1]), (hi[0], hi[1]))


# --- falloff laws -------------------------------------------------------------


def linear_falloff(distance: np.ndarray, cost: float, clearance: float) -> np.ndarray:
    """1 + (cost-1) * max(0, 1 - d/clearance); a point mass when clearance is 0."""
    d = np.asarray(distance, dtype=float)
    if clearance > 0.0:
        with np.errstate(over="ignore"):  # d/clearance may overflow for subnormal clearances
            return 1.0 + (cost - 1.0) * np.maximum(0.0, 1.0 - d / clearance)
    return np.where(d <= 0.0, cost, 1.0)


def gaussian_falloff(distance: np.ndarray, cost: float, clearance: float) -> np.ndarray:
    """Smooth alternative: exp decay with ~2% residual impact at the clearance."""
    d = np.asarray(distance, dtype=float)
    if clearance > 0.0:
        return 1.0 + (cost - 1.0) * np.exp(-4.0 * (d / clearance) ** 2)
    return np.where(d <= 0.0, cost, 1.0)


FALLOFF_LAWS = {
    "linear": linear_falloff,
    "gaussian": gaussian_falloff,
}


@dataclass(frozen=True)
class Contribution:
    footprint: Footprint
    cost: float
    clearance: float

    def __post_init__(self) -> None:
        if self.cost < 1.0:
            raise ValueError("cost must be >= 1")
        if self.clearance < 0.0:
            raise ValueError("clearance must be >= 0")


@dataclass(frozen=True)
class FieldSpec:
    """All contributions of a scene; combined by pointwise maximum."""

    contributions: tuple[Contribution, ...] = ()
    falloff: str = "linear"

    def __post_init__(self) -> None:
        object.__setattr__(self, "contributions", tuple(self.contributions))
        if self.falloff not in FALLOFF_LAWS:
            raise ValueError(f'unknown falloff law "{self.falloff}"')


@dataclass(frozen=True)
class ActivityZone:
    """Corridor between a human and the target of one of their activities."""

    corridor: OrientedRectFootprint
    verb: str
    cost: float
    clearance: float


def make_activity_zones(
    partial: SceneGraph, config: Mapping[str, tuple[float, float]]
) -> list[ActivityZone]:
    """One corridor per activity relation whose verb appears in ``config``.

    The corridor runs between the two footprint centers; its width is the
    larger planar side of the wider endpoint. An empty config disables the
    feature (the default: costs attach to objects only, not to regions).
    """
    zones: list[ActivityZone] = []
    for rel in partial.relations:
        if rel.kind is not RelationKind.ACTIVITY or rel.name not in config:
            continue
        cost, clearance = config[rel.name]
        head = footprint_of(partial.node(rel.head_id))
        tail = footprint_of(partial.node(rel.tail_id))
        hx, hy = head.center
        tx, ty = tail.center
        length = math.hypot(tx - hx, ty - hy)
        if length == 0.0:
            continue  # coincident footprints leave no corridor
        width = max(max(head.sides), max(tail.sides))
        corridor = OrientedRectFootprint(
            center=((hx + tx) / 2.0, (hy + ty) / 2.0),
            axis=(tx - hx, ty - hy),
            half_length=length / 2.0,
            half_width=width / 2.0,
        )
        zones.append(ActivityZone(corridor=corridor, verb=rel.name, cost=cost, clearance=clearance))
    return zones


# --- evaluation ---------------------------------------------------------------


def _evaluate(
    points: np.ndarray, spec: FieldSpec, zones: Sequence[ActivityZone] = ()
) -> np.ndarray:
    law = FALLOFF_LAWS[spec.falloff]
    values = np.ones(len(points), dtype=float)
    contributions = list(spec.contributions) + [
        Contribution(z.corridor, z.cost, z.clearance) for z in zones
    ]
    for contribution in contributions:
        d = contribution.footprint.distance(points)
        np.maximum(values, law(d, contribution.cost, contribution.clearance), out=values)
    return values


def point_cost(
    point: Iterable[float],
    footprint: Footprint,
    cost: float,
    clearance: float,
    falloff: str = "linear",
) -> float:
    """Field value of a single contribution at one point; always in [1, cost]."""
    spec = FieldSpec((Contribution(footprint, cost, clearance),), falloff)
    pts = np.asarray([tuple(float(c) for c in point)], dtype=float)
    return float(_evaluate(pts, spec)[0])


def combined_cost(point: Iterable[float], spec: FieldSpec) -> float:
    """Pointwise maximum over all contributions; 1 for an empty spec."""
    pts = np.asarray([tuple(float(c) for c in point)], dtype=float)
    return float(_evaluate(pts, spec)[0])


def field_spec_from_assessment(graph: SceneGraph, assessment, falloff: str = "linear") -> FieldSpec:
    """Contributions from assessed objects' footprints, in sorted-id order."""
    contributions = tuple(
        Contribution(footprint_of(graph.node(object_id)), cc.cost, cc.clearance)
        for object_id, cc in sorted(assessment.entries.items())
    )
    return FieldSpec(contributions, falloff)


# --- costmap ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Costmap:
    """Rasterized planar cost grid.

    ``cells[iy, ix]`` holds the cost at the center of the cell whose lower
    left corner is ``origin + (ix, iy) * resolution``; every cell is >= 1.
    """

    origin: Vec2
    resolution: float
    width: int
    height: int
    cells: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))
        cells = np.asarray(self.cells, dtype=float)
        if cells.shape != (self.height, self.width):
            raise ValueError(f"cells shape {cells.shape} != (height, width)")
        if self.resolution <= 0 or self.width <= 0 or self.height <= 0:
            raise ValueError("resolution and dimensions must be > 0")
        if cells.size and cells.min() < 1.0:
            raise ValueError("every cell must be >= 1")
        object.__setattr__(self, "cells", cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Costmap):
            return NotImplemented
        return (
            self.origin == other.origin
            and self.resolution == other.resolution
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.cells, other.cells)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def max_xy(self) -> Vec2:
        return (
            self.origin[0] + self.width * self.resolution,
            self.origin[1] + self.height * self.resolution,
        )

    def cell_center(self, ix: int, iy: int) -> Vec2:
        return (
            self.origin[0] + (ix + 0.5) * self.resolution,
            self.origin[1] + (iy + 0.5) * self.resolution,
        )

    def cell_at(self, point: Iterable[float]) -> tuple[int, int]:
        x, y = (float(c) for c in point)
        ix = math.floor((x - self.origin[0]) / self.resolution)
        iy = math.floor((y - self.origin[1]) / self.resolution)
        if not (0 <= ix < self.width and 0 <= iy < self.height):
            raise ValueError(f"point ({x}, {y}) lies outside the costmap")
        return (ix, iy)

    def value(self, ix: int, iy: int) -> float:
        return float(self.cells[iy, ix])


def rasterize(
    spec: FieldSpec,
    zones: Sequence[ActivityZone],
    bounds: tuple[Vec2, Vec2],
    resolution: float,
) -> Costmap:
    """Sample the combined field at every cell center over ``bounds``.

    Cell values equal ``combined_cost`` at the exact center coordinates (the
    same evaluation kernel runs for both), so there is no interpolation error
    to account for.
    """
    (xmin, ymin), (xmax, ymax) = bounds
    if resolution <= 0:
        raise ValueError("resolution must be > 0")
    if xmax <= xmin or ymax <= ymin:
        raise ValueError("bounds must span a non-degenerate rectangle")
    width = math.ceil((xmax - xmin) / resolution - 1e-9)
    height = math.ceil((ymax - ymin) / resolution - 1e-9)
    xs = xmin + (np.arange(width, dtype=float) + 0.5) * resolution
    ys = ymin + (np.arange(height, dtype=float) + 0.5) * resolution
    grid_x, grid_y = np.meshgrid(xs, ys)
    points = np.column_stack([grid_x.ravel(), grid_y.ravel()])
    values = _evaluate(points, spec, zones).reshape(height, width)
    return Costmap(origin=(float(xmin), float(ymin)), resolution=float(resolution),
                   width=width, height=height, cells=values)


def costmap_to_dict(costmap: Costmap) -> dict:
    return {
        "origin": list(costmap.origin),
        "resolution": costmap.resolution,
        "width": costmap.width,
        "height": costmap.height,
        "cells": [[float(v) for v in row] for row in costmap.cells],
    }


def costmap_from_dict(data: dict) -> Costmap:
    return Costmap(
        origin=tuple(data["origin"]),
        resolution=float(data["resolution"]),
        width=int(data["width"]),
        height=int(data["height"]),
        cells=np.asarray(data["cells"], dtype=float),
    )


def costmap_to_text(costmap: Costmap) -> str:
    """Portable text grid: header lines, then one row of cell values per line."""
    lines = [
        COSTMAP_TEXT_HEADER,
        f"origin {costmap.origin[0]!r} {costmap.origin[1]!r}",
        f"resolution {costmap.resolution!r}",
        f"size {costmap.width} {costmap.height}",
    ]
    for row in costmap.cells:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def costmap_from_text(text: str) -> Costmap:
    lines = text.splitlines()
    if not lines or lines[0] != COSTMAP_TEXT_HEADER:
        raise ValueError(f'expected header "{COSTMAP_TEXT_HEADER}"')
    try:
        _, ox, oy = lines[1].split()
        _, res = lines[2].split()
        _, width, height = lines[3].split()
        rows = [[float(v) for v in line.split()] for line in lines[4 : 4 + int(height)]]
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed costmap text: {exc}") from exc
    return Costmap(
        origin=(float(ox), float(oy)),
        resolution=float(res),
        width=int(width),
        height=int(height),
        cells=np.asarray(rows, dtype=float),
    )
