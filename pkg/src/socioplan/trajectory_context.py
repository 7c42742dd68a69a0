"""Trajectories, extraction of the trajectory-relevant partial scene graph,
and the canonical per-object description text fed to assessors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .scene_graph import SceneGraph, Vec3, Violation, objects_within_radius

DEFAULT_QUERY_RADIUS_M = 2.0
# Relevance is sampled at waypoints only; trajectories are densified to this
# spacing first so segment coverage is implied.
DEFAULT_WAYPOINT_SPACING_M = 0.25


@dataclass(frozen=True)
class Trajectory:
    """Ordered sequence of 3D waypoints; at least one waypoint."""

    waypoints: tuple[Vec3, ...]

    def __post_init__(self) -> None:
        waypoints = tuple(tuple(float(c) for c in p) for p in self.waypoints)
        if not waypoints:
            raise ValueError("a trajectory needs at least one waypoint")
        if any(len(p) != 3 for p in waypoints):
            raise ValueError("waypoints must be 3-vectors")
        object.__setattr__(self, "waypoints", waypoints)

    def __len__(self) -> int:
        return len(self.waypoints)


def validate_trajectory(trajectory: Trajectory) -> list[Violation]:
    """Flag consecutive duplicate waypoints (permitted, but usually a bug)."""
    violations = []
    for i in range(1, len(trajectory.waypoints)):
        if trajectory.waypoints[i] == trajectory.waypoints[i - 1]:
            violations.append(
                Violation(
                    "duplicate waypoint",
                    (),
                    f"waypoints {i - 1} and {i} are identical: {trajectory.waypoints[i]}",
                )
            )
    return violations


def resample(trajectory: Trajectory, max_spacing: float = DEFAULT_WAYPOINT_SPACING_M) -> Trajectory:
    """Insert evenly spaced waypoints so consecutive ones are <= max_spacing apart."""
    if max_spacing <= 0:
        raise ValueError("max_spacing must be > 0")
    if not math.isfinite(max_spacing):
        return trajectory
    points = [trajectory.waypoints[0]]
    for a, b in zip(trajectory.waypoints, trajectory.waypoints[1:]):
        length = math.dist(a, b)
        steps = max(1, math.ceil(length / max_spacing))
        for k in range(1, steps + 1):
            t = k / steps
            points.append(tuple(a[i] + (b[i] - a[i]) * t for i in range(3)))
    return Trajectory(tuple(points))


def relevant_objects(
    graph: SceneGraph,
    trajectory: Trajectory,
    radius: float = DEFAULT_QUERY_RADIUS_M,
    *,
    max_spacing: float = DEFAULT_WAYPOINT_SPACING_M,
) -> tuple[str, ...]:
    """Ids of objects within ``radius`` of any (densified) waypoint.

    Ordered by first waypoint index of appearance, ties broken by id, so the
    result is deterministic.
    """
    if radius <= 0:
        raise ValueError("query radius must be > 0")
    dense = resample(trajectory, max_spacing)
    ordered: list[str] = []
    seen: set[str] = set()
    for point in dense.waypoints:
        hits = objects_within_radius(graph, point, radius) - seen
        for node_id in sorted(hits):
            ordered.append(node_id)
            seen.add(node_id)
    return tuple(ordered)


def attached_humans(graph: SceneGraph, ids: Iterable[str]) -> tuple[str, ...]:
    """Human node ids related (either direction) to any of ``ids``, minus ids."""
    wanted = set(ids)
    extras: set[str] = set()
    for rel in graph.relations:
        for human_end, other_end in ((rel.head_id, rel.tail_id), (rel.tail_id, rel.head_id)):
            if human_end in wanted or human_end not in graph:
                continue
            if graph.node(human_end).is_human and other_end in wanted:
                extras.add(human_end)
    return tuple(sorted(extras))


def induce_partial_graph(graph: SceneGraph, ids: Iterable[str]) -> SceneGraph:
    """Subgraph of ``ids`` plus any humans related to them.

    Keeps every relation among the given nodes and every relation linking a
    pulled-in human to a given node, so human context survives extraction.
    The result is always a valid scene graph.
    """
    wanted = set(ids)
    for node_id in wanted:
        if node_id not in graph:
            raise ValueError(f'unknown object id "{node_id}"')
    extras = set(attached_humans(graph, wanted))
    keep = wanted | extras

    def keep_relation(head: str, tail: str) -> bool:
        if head in wanted and tail in wanted:
            return True
        # Human-attachment edges: one pulled-in human, one requested node.
        return (head in extras and tail in wanted) or (head in wanted and tail in extras)

    nodes = {i: n for i, n in graph.nodes.items() if i in keep}
    relations = tuple(r for r in graph.relations if keep_relation(r.head_id, r.tail_id))
    return SceneGraph(nodes=nodes, relations=relations)


@dataclass(frozen=True)
class ObjectDescription:
    """Assessor-facing record for one object.

    ``relations`` holds (verb, other entity label, inverted) tuples: edges
    where the object is head, plus inverted-flagged edges where it is tail.
    Labels are tags, with the id appended on tag collisions.
    """

    object_id: str
    object_tag: str
    bbox_center: Vec3
    bbox_extent: Vec3
    affordances: frozenset[str]
    attributes: frozenset[str]
    relations: frozenset[tuple[str, str, bool]]


def _entity_label(graph: SceneGraph, node_id: str) -> str:
    tag = graph.node(node_id).tag
    collisions = sum(1 for n in graph if n.tag == tag)
    return f"{tag}[{node_id}]" if collisions > 1 else tag


def describe_object(graph: SceneGraph, object_id: str) -> ObjectDescription:
    node = graph.node(object_id)
    relations = set()
    for rel in graph.relations:
        if rel.head_id == object_id:
            relations.add((rel.name, _entity_label(graph, rel.tail_id), False))
        elif rel.tail_id == object_id:
            relations.add((rel.name, _entity_label(graph, rel.head_id), True))
    return ObjectDescription(
        object_id=node.id,
        object_tag=node.tag,
        bbox_center=node.bbox_center,
        bbox_extent=node.bbox_extent,
        affordances=node.affordances,
        attributes=node.attributes,
        relations=frozenset(relations),
    )


def _vec(values: Sequence[float]) -> str:
    return "[" + ", ".join(f"{v:.3f}" for v in values) + "]"


def _names(values: Iterable[str]) -> str:
    return "[" + ", ".join(sorted(values)) + "]"


def _relation_text(entry: tuple[str, str, bool]) -> str:
    name, other, inverted = entry
    return f"({name}, {other}, inverted)" if inverted else f"({name}, {other})"


def render_context_text(
    partial: SceneGraph, trajectory: Trajectory, preferences: Sequence[str]
) -> str:
    """Canonical text block describing the partial graph, trajectory, and
    preferences. Identical inputs always produce byte-identical text."""
    lines = ["OBJECTS"]
    node_ids = sorted(partial.nodes)
    if not node_ids:
        lines.append("(none)")
    for node_id in node_ids:
        d = describe_object(partial, node_id)
        rel_text = "[" + ", ".join(
            _relation_text(r) for r in sorted(d.relations)
        ) + "]"
        lines += [
            f"- object_id: {d.object_id}",
            f"  object_tag: {d.object_tag}",
            f"  bbox_center: {_vec(d.bbox_center)}",
            f"  bbox_extent: {_vec(d.bbox_extent)}",
            f"  affordances: {_names(d.affordances)}",
            f"  attributes: {_names(d.attributes)}",
            f"  relations: {rel_text}",
        ]
    lines.append("TRAJECTORY")
    for point in trajectory.waypoints:
        lines.append(f"- {_vec(point)}")
    lines.append("PREFERENCES")
    if preferences:
        lines.extend(f"- {p}" for p in preferences)
    else:
        lines.append("(none)")
    return "\n".join(lines) + "\n"
