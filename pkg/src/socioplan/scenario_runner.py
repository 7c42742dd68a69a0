"""End-to-end orchestration: scenario files, condition ablation runs,
deterministic run reports, and the condition comparison table."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path as FilePath
from typing import Sequence

import numpy as np

from .cost_assessment import (
    Assessment,
    AssessmentError,
    AssessorPort,
    CostClearance,
    HttpChatTransport,
    LlmAssessor,
    Provenance,
    ReplayAssessor,
    RetryPolicy,
    RuleAssessor,
    load_assessment_fixtures,
)
from .cost_field import Costmap, RectFootprint, costmap_from_dict, costmap_to_dict
from .human_augmentation import Condition, HumanSpec, insert_human
from .jsonio import (
    FormatError,
    canonical_json,
    check_keys,
    finite_number,
    parse_document,
    require_version,
    string,
    string_list,
    vector,
)
from .planner import Path, PlanningError, iterate_plan
from .render import render_svg  # noqa: F401  (part of this module's surface)
from .scene_graph import SceneGraph, Vec3, load_scene, scene_to_dict

Vec2 = tuple[float, float]

SCENARIO_SCHEMA_VERSION = 1
REPORT_SCHEMA_VERSION = 1

ASSESSOR_KINDS = ("rules", "llm", "replay")


class ScenarioError(Exception):
    """A scenario run failed; message carries the condition and stage."""


@dataclass(frozen=True)
class AssessorConfig:
    kind: str
    fixtures: str | None = None  # replay: fixture file, relative to the scenario
    scenario_key: str | None = None  # replay: defaults to the scenario name
    model: str | None = None  # llm: model name
    max_attempts: int = 3  # llm: retry budget


@dataclass(frozen=True)
class Scenario:
    """One runnable experiment: scene, human, conditions, and planner setup."""

    name: str
    scene: str
    conditions: tuple[Condition, ...]
    start: Vec2
    goal: Vec2
    query_radius_m: float
    bounds: tuple[Vec2, Vec2]
    resolution: float
    assessor: AssessorConfig
    human: HumanSpec | None = None
    preferences: tuple[str, ...] = ()
    waypoints: tuple[Vec3, ...] | None = None
    activity_zones: tuple[tuple[str, tuple[float, float]], ...] = ()
    base_dir: FilePath = field(default=FilePath("."), compare=False)

    def scene_path(self) -> FilePath:
        return self.base_dir / self.scene

    def fixtures_path(self) -> FilePath | None:
        if self.assessor.fixtures is None:
            return None
        return self.base_dir / self.assessor.fixtures

    def zone_config(self) -> dict[str, tuple[float, float]]:
        return dict(self.activity_zones)


def _parse_human(raw: dict, path: str, strict: bool) -> HumanSpec:
    check_keys(
        raw,
        required=("id", "bbox_center", "bbox_extent"),
        optional=("spatial_relations", "activity_relations"),
        path=path,
        strict=strict,
    )

    def pairs(key: str) -> tuple[tuple[str, str], ...]:
        out = []
        for i, item in enumerate(raw.get(key, [])):
            item_path = f"{path}.{key}[{i}]"
            if not isinstance(item, list) or len(item) != 2:
                raise FormatError("expected a [verb, target id] pair", item_path)
            out.append((string(item[0], f"{item_path}[0]"), string(item[1], f"{item_path}[1]")))
        return tuple(out)

    return HumanSpec(
        id=string(raw["id"], f"{path}.id"),
        bbox_center=vector(raw["bbox_center"], f"{path}.bbox_center", 3),
        bbox_extent=vector(raw["bbox_extent"], f"{path}.bbox_extent", 3),
        spatial_relations=pairs("spatial_relations"),
        activity_relations=pairs("activity_relations"),
    )


def _parse_assessor(raw: dict, path: str, strict: bool) -> AssessorConfig:
    check_keys(
        raw,
        required=("kind",),
        optional=("fixtures", "scenario_key", "model", "max_attempts"),
        path=path,
        strict=strict,
    )
    kind = string(raw["kind"], f"{path}.kind")
    if kind not in ASSESSOR_KINDS:
        raise FormatError(f'unknown assessor kind "{kind}" (valid: {", ".join(ASSESSOR_KINDS)})', f"{path}.kind")
    max_attempts = raw.get("max_attempts", 3)
    if not isinstance(max_attempts, int) or max_attempts < 1:
        raise FormatError("max_attempts must be an integer >= 1", f"{path}.max_attempts")
    return AssessorConfig(
        kind=kind,
        fixtures=string(raw["fixtures"], f"{path}.fixtures") if "fixtures" in raw else None,
        scenario_key=string(raw["scenario_key"], f"{path}.scenario_key")
        if "scenario_key" in raw
        else None,
        model=string(raw["model"], f"{path}.model") if "model" in raw else None,
        max_attempts=max_attempts,
    )


def parse_scenario(document: bytes | str, base_dir: FilePath, *, strict: bool = False) -> Scenario:
    data = parse_document(document, what="scenario document")
    check_keys(
        data,
        required=(
            "name",
            "scene",
            "conditions",
            "start",
            "goal",
            "query_radius_m",
            "map",
            "assessor",
        ),
        optional=("schema_version", "human", "preferences", "waypoints", "activity_zones"),
        path="$",
        strict=strict,
    )
    require_version(data, "$", SCENARIO_SCHEMA_VERSION)

    raw_conditions = data["conditions"]
    if not isinstance(raw_conditions, list) or not raw_conditions:
        raise FormatError("conditions must be a non-empty list", "conditions")
    conditions = []
    for i, value in enumerate(raw_conditions):
        try:
            conditions.append(Condition(string(value, f"conditions[{i}]")))
        except ValueError:
            valid = ", ".join(c.value for c in Condition)
            raise FormatError(f'unknown condition "{value}" (valid: {valid})', f"conditions[{i}]") from None

    raw_map = data["map"]
    check_keys(raw_map, required=("bounds", "resolution"), optional=(), path="map", strict=strict)
    raw_bounds = raw_map["bounds"]
    if not isinstance(raw_bounds, list) or len(raw_bounds) != 2:
        raise FormatError("expected [[xmin, ymin], [xmax, ymax]]", "map.bounds")
    low = vector(raw_bounds[0], "map.bounds[0]", 2)
    high = vector(raw_bounds[1], "map.bounds[1]", 2)
    if high[0] <= low[0] or high[1] <= low[1]:
        raise FormatError("bounds must span a non-degenerate rectangle", "map.bounds")
    resolution = finite_number(raw_map["resolution"], "map.resolution")
    if resolution <= 0:
        raise FormatError("resolution must be > 0", "map.resolution")

    radius = finite_number(data["query_radius_m"], "query_radius_m")
    if radius <= 0:
        raise FormatError("query_radius_m must be > 0", "query_radius_m")

    start = vector(data["start"], "start", 2)
    goal = vector(data["goal"], "goal", 2)
    for label, point in (("start", start), ("goal", goal)):
        if not (low[0] <= point[0] <= high[0] and low[1] <= point[1] <= high[1]):
            raise FormatError(f"{label} {list(point)} lies outside map.bounds", label)

    waypoints = None
    if "waypoints" in data:
        raw_waypoints = data["waypoints"]
        if not isinstance(raw_waypoints, list) or not raw_waypoints:
            raise FormatError("waypoints must be a non-empty list", "waypoints")
        waypoints = tuple(vector(p, f"waypoints[{i}]", 3) for i, p in enumerate(raw_waypoints))

    zones: list[tuple[str, tuple[float, float]]] = []
    for verb, raw_zone in data.get("activity_zones", {}).items():
        zone_path = f"activity_zones[{verb!r}]"
        pair = vector(raw_zone, zone_path, 2)
        if pair[0] < 1 or pair[1] < 0:
            raise FormatError("zone cost must be >= 1 and clearance >= 0", zone_path)
        zones.append((verb, (pair[0], pair[1])))

    scenario = Scenario(
        name=string(data["name"], "name"),
        scene=string(data["scene"], "scene"),
        conditions=tuple(conditions),
        start=(start[0], start[1]),
        goal=(goal[0], goal[1]),
        query_radius_m=radius,
        bounds=((low[0], low[1]), (high[0], high[1])),
        resolution=resolution,
        assessor=_parse_assessor(data["assessor"], "assessor", strict),
        human=_parse_human(data["human"], "human", strict) if "human" in data else None,
        preferences=tuple(string_list(data.get("preferences", []), "preferences")),
        waypoints=waypoints,
        activity_zones=tuple(zones),
        base_dir=base_dir,
    )
    if not scenario.scene_path().is_file():
        raise FormatError(f"scene file not found: {scenario.scene_path()}", "scene")
    fixtures = scenario.fixtures_path()
    if fixtures is not None and not fixtures.is_file():
        raise FormatError(f"fixture file not found: {fixtures}", "assessor.fixtures")
    return scenario


def load_scenario(path: str | FilePath, *, strict: bool = False) -> Scenario:
    path = FilePath(path)
    if not path.is_file():
        raise FormatError(f"scenario file not found: {path}")
    return parse_scenario(path.read_bytes(), path.parent, strict=strict)


def scenario_to_dict(scenario: Scenario) -> dict:
    data: dict = {
        "schema_version": SCENARIO_SCHEMA_VERSION,
        "name": scenario.name,
        "scene": scenario.scene,
        "conditions": [c.value for c in scenario.conditions],
        "start": list(scenario.start),
        "goal": list(scenario.goal),
        "query_radius_m": scenario.query_radius_m,
        "map": {"bounds": [list(scenario.bounds[0]), list(scenario.bounds[1])],
                "resolution": scenario.resolution},
        "assessor": {"kind": scenario.assessor.kind},
    }
    if scenario.assessor.fixtures is not None:
        data["assessor"]["fixtures"] = scenario.assessor.fixtures
    if scenario.assessor.scenario_key is not None:
        data["assessor"]["scenario_key"] = scenario.assessor.scenario_key
    if scenario.assessor.model is not None:
        data["assessor"]["model"] = scenario.assessor.model
    if scenario.assessor.max_attempts != 3:
        data["assessor"]["max_attempts"] = scenario.assessor.max_attempts
    if scenario.human is not None:
        data["human"] = {
            "id": scenario.human.id,
            "bbox_center": list(scenario.human.bbox_center),
            "bbox_extent": list(scenario.human.bbox_extent),
            "spatial_relations": [list(p) for p in scenario.human.spatial_relations],
            "activity_relations": [list(p) for p in scenario.human.activity_relations],
        }
    if scenario.preferences:
        data["preferences"] = list(scenario.preferences)
    if scenario.waypoints is not None:
        data["waypoints"] = [list(p) for p in scenario.waypoints]
    if scenario.activity_zones:
        data["activity_zones"] = {verb: list(pair) for verb, pair in scenario.activity_zones}
    return data


def serialize_scenario(scenario: Scenario) -> str:
    return canonical_json(scenario_to_dict(scenario))


def build_assessor(
    scenario: Scenario, condition: Condition, kind_override: str | None = None
) -> AssessorPort:
    """Construct the assessor port a scenario requests for one condition."""
    kind = kind_override or scenario.assessor.kind
    if kind == "rules":
        return RuleAssessor()
    if kind == "replay":
        fixtures = scenario.fixtures_path()
        if fixtures is None:
            raise ScenarioError("replay assessor needs assessor.fixtures in the scenario")
        store = load_assessment_fixtures(fixtures.read_bytes())
        key = scenario.assessor.scenario_key or scenario.name
        return ReplayAssessor(store=store, scenario_key=key, condition=condition)
    if kind == "llm":
        if scenario.assessor.model is None:
            raise ScenarioError("llm assessor needs assessor.model in the scenario")
        transport = HttpChatTransport(model=scenario.assessor.model)
        return LlmAssessor(transport=transport, policy=RetryPolicy(scenario.assessor.max_attempts))
    raise ScenarioError(f'unknown assessor kind "{kind}"')


# --- report -------------------------------------------------------------------


@dataclass(frozen=True)
class PathStats:
    total_cost: float
    length_m: float
    min_distance_to_human_m: float | None


@dataclass(frozen=True)
class ConditionResult:
    condition: Condition
    assessment: Assessment
    path: Path
    costmap: Costmap
    rounds: int
    relevant: tuple[str, ...]
    stats: PathStats
    timing_s: float | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RunReport:
    """Per-condition results; serialization is deterministic (timing stays
    in memory only so repeated runs serialize byte-identically)."""

    scenario_name: str
    scene: SceneGraph
    conditions: tuple[ConditionResult, ...]


def min_distance_to_footprint(polyline: Sequence[Vec2], footprint: RectFootprint) -> float:
    """Smallest planar distance from any polyline vertex to the footprint."""
    points = np.asarray(polyline, dtype=float)
    return float(footprint.distance(points).min())


def human_footprint(scenario: Scenario) -> RectFootprint | None:
    if scenario.human is None:
        return None
    c, e = scenario.human.bbox_center, scenario.human.bbox_extent
    return RectFootprint((c[0] - e[0] / 2.0, c[1] - e[1] / 2.0), (c[0] + e[0] / 2.0, c[1] + e[1] / 2.0))


def run_scenario(
    scenario: Scenario,
    *,
    assessor_kind: str | None = None,
    keep_spatial: bool = False,
    strict: bool = False,
) -> RunReport:
    """Run every requested condition: derive the graph variant, iterate
    assess-and-plan, and collect path statistics.

    Deterministic for the rules and replay assessors. Errors are re-raised as
    ScenarioError annotated with the condition and pipeline stage.
    """
    scene = load_scene(scenario.scene_path().read_bytes(), strict=strict)
    base = insert_human(scene, scenario.human) if scenario.human is not None else scene
    footprint = human_footprint(scenario)

    results = []
    for condition in scenario.conditions:
        started = time.perf_counter()
        try:
            port = build_assessor(scenario, condition, assessor_kind)
            iteration = iterate_plan(
                base,
                condition,
                scenario.start,
                scenario.goal,
                scenario.query_radius_m,
                port,
                bounds=scenario.bounds,
                resolution=scenario.resolution,
                preferences=scenario.preferences,
                activity_zones=scenario.zone_config(),
                keep_spatial=keep_spatial,
            )
        except (ScenarioError, AssessmentError, PlanningError, FormatError, ValueError) as exc:
            if isinstance(exc, AssessmentError):
                stage = "assess"
            elif isinstance(exc, PlanningError):
                stage = "plan"
            elif isinstance(exc, FormatError):
                stage = "load"
            else:
                stage = "setup"
            raise ScenarioError(
                f'condition "{condition.value}", stage "{stage}": {exc}'
            ) from exc
        min_distance = (
            min_distance_to_footprint(iteration.path.polyline, footprint)
            if footprint is not None
            else None
        )
        results.append(
            ConditionResult(
                condition=condition,
                assessment=iteration.assessment,
                path=iteration.path,
                costmap=iteration.costmap,
                rounds=iteration.rounds,
                relevant=iteration.relevant,
                stats=PathStats(
                    total_cost=iteration.path.total_cost,
                    length_m=iteration.path.length_m,
                    min_distance_to_human_m=min_distance,
                ),
                timing_s=time.perf_counter() - started,
            )
        )
    return RunReport(scenario_name=scenario.name, scene=base, conditions=tuple(results))


def report_to_dict(report: RunReport) -> dict:
    conditions = []
    for result in report.conditions:
        conditions.append(
            {
                "condition": result.condition.value,
                "rounds": result.rounds,
                "relevant": list(result.relevant),
                "assessment": {
                    "provenance": {
                        "assessor": result.assessment.provenance.assessor,
                        "parameters": dict(result.assessment.provenance.parameters),
                        "attempts": result.assessment.provenance.attempts,
                        "transcript": [list(t) for t in result.assessment.provenance.transcript],
                    },
                    "entries": {
                        object_id: {"cost": cc.cost, "clearance": cc.clearance}
                        for object_id, cc in sorted(result.assessment.entries.items())
                    },
                },
                "path": {
                    "cells": [list(c) for c in result.path.cells],
                    "polyline": [list(p) for p in result.path.polyline],
                    "total_cost": result.path.total_cost,
                    "length_m": result.path.length_m,
                },
                "stats": {
                    "total_cost": result.stats.total_cost,
                    "length_m": result.stats.length_m,
                    "min_distance_to_human_m": result.stats.min_distance_to_human_m,
                },
                "costmap": costmap_to_dict(result.costmap),
            }
        )
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": report.scenario_name,
        "scene": scene_to_dict(report.scene),
        "conditions": conditions,
    }


def report_to_json(report: RunReport) -> str:
    return canonical_json(report_to_dict(report))


def load_report(document: bytes | str, *, strict: bool = False) -> RunReport:
    data = parse_document(document, what="report document")
    check_keys(
        data,
        required=("scenario", "scene", "conditions"),
        optional=("schema_version",),
        path="$",
        strict=strict,
    )
    require_version(data, "$", REPORT_SCHEMA_VERSION)
    scene = load_scene(canonical_json(data["scene"]), strict=strict)
    conditions = []
    for i, raw in enumerate(data["conditions"]):
        path = f"conditions[{i}]"
        check_keys(
            raw,
            required=("condition", "rounds", "relevant", "assessment", "path", "stats", "costmap"),
            optional=(),
            path=path,
            strict=strict,
        )
        try:
            condition = Condition(raw["condition"])
        except ValueError:
            raise FormatError(f'unknown condition "{raw["condition"]}"', f"{path}.condition") from None
        prov = raw["assessment"]["provenance"]
        assessment = Assessment(
            entries={
                object_id: CostClearance(float(e["cost"]), float(e["clearance"]))
                for object_id, e in raw["assessment"]["entries"].items()
            },
            provenance=Provenance(
                assessor=prov["assessor"],
                parameters=dict(prov["parameters"]),
                attempts=int(prov["attempts"]),
                transcript=tuple((role, text) for role, text in prov["transcript"]),
            ),
        )
        raw_path = raw["path"]
        plan_path = Path(
            cells=tuple((int(c[0]), int(c[1])) for c in raw_path["cells"]),
            polyline=tuple((float(p[0]), float(p[1])) for p in raw_path["polyline"]),
            total_cost=float(raw_path["total_cost"]),
            length_m=float(raw_path["length_m"]),
        )
        raw_stats = raw["stats"]
        stats = PathStats(
            total_cost=float(raw_stats["total_cost"]),
            length_m=float(raw_stats["length_m"]),
            min_distance_to_human_m=(
                None
                if raw_stats["min_distance_to_human_m"] is None
                else float(raw_stats["min_distance_to_human_m"])
            ),
        )
        conditions.append(
            ConditionResult(
                condition=condition,
                assessment=assessment,
                path=plan_path,
                costmap=costmap_from_dict(raw["costmap"]),
                rounds=int(raw["rounds"]),
                relevant=tuple(raw["relevant"]),
                stats=stats,
            )
        )
    return RunReport(
        scenario_name=data["scenario"], scene=scene, conditions=tuple(conditions)
    )


# --- comparison ---------------------------------------------------------------


def format_value(value: float) -> str:
    """Trailing-zero-free numbers: 1.0 -> "1", 0.5 -> "0.5"."""
    return format(value, "g")


def comparison_dict(report: RunReport) -> dict:
    """Machine-readable companion of the comparison table."""
    if len(report.conditions) < 2:
        raise ValueError("need >= 2 conditions to compare")
    objects = sorted({o for r in report.conditions for o in r.assessment.entries})
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": report.scenario_name,
        "objects": objects,
        "conditions": [
            {
                "condition": r.condition.value,
                "label": r.condition.label,
                "entries": {
                    object_id: {"cost": cc.cost, "clearance": cc.clearance}
                    for object_id, cc in sorted(r.assessment.entries.items())
                },
            }
            for r in report.conditions
        ],
    }


def compare_conditions(report: RunReport) -> str:
    """Aligned text table: one row per condition, one "cost (clearance)"
    column per object, "-" where a condition did not assess the object."""
    data = comparison_dict(report)
    objects: list[str] = data["objects"]
    header = ["Condition"] + objects
    rows = [header]
    for entry in data["conditions"]:
        row = [entry["label"]]
        for object_id in objects:
            cc = entry["entries"].get(object_id)
            row.append(
                "-" if cc is None else f"{format_value(cc['cost'])} ({format_value(cc['clearance'])})"
            )
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"
