"""3D semantic scene graphs: object nodes with axis-aligned bounding boxes,
labeled directed relations, a JSON file format, validation, and the geometric
queries the planning pipeline builds on.

Conventions: coordinates are (x, y, z) in meters with z up; ``bbox_extent``
stores full side lengths (not half-extents); boxes are axis-aligned. Graphs
are immutable after construction; derived graphs are built by copying.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .jsonio import (
    FormatError,
    canonical_json,
    check_keys,
    parse_document,
    require_version,
    string,
    string_list,
    vector,
)

Vec3 = tuple[float, float, float]

SCENE_SCHEMA_VERSION = 1
HUMAN_TAG = "human"


class RelationKind(enum.Enum):
    SPATIAL = "spatial"
    COMPARATIVE = "comparative"
    ACTIVITY = "activity"


@dataclass(frozen=True)
class ObjectNode:
    """One scene object.

    ``affordances`` are actions the object supports ("sit", "open");
    ``attributes`` are descriptive labels ("wooden", "soft").
    """

    id: str
    tag: str
    bbox_center: Vec3
    bbox_extent: Vec3
    affordances: frozenset[str] = frozenset()
    attributes: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "bbox_center", tuple(float(c) for c in self.bbox_center))
        object.__setattr__(self, "bbox_extent", tuple(float(c) for c in self.bbox_extent))
        object.__setattr__(self, "affordances", frozenset(self.affordances))
        object.__setattr__(self, "attributes", frozenset(self.attributes))

    @property
    def bbox_min(self) -> Vec3:
        c, e = self.bbox_center, self.bbox_extent
        return (c[0] - e[0] / 2.0, c[1] - e[1] / 2.0, c[2] - e[2] / 2.0)

    @property
    def bbox_max(self) -> Vec3:
        c, e = self.bbox_center, self.bbox_extent
        return (c[0] + e[0] / 2.0, c[1] + e[1] / 2.0, c[2] + e[2] / 2.0)

    @property
    def is_human(self) -> bool:
        return self.tag == HUMAN_TAG


@dataclass(frozen=True)
class Relation:
    """Directed labeled edge ``head --name--> tail``."""

    name: str
    head_id: str
    tail_id: str
    kind: RelationKind

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.name, self.head_id, self.tail_id)


@dataclass(frozen=True)
class Violation:
    """One broken invariant; validation reports these as data, not failures."""

    rule: str
    ids: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class SceneGraph:
    """Immutable scene graph: id-keyed nodes plus directed relations."""

    nodes: Mapping[str, ObjectNode]
    relations: tuple[Relation, ...] = ()

    def __post_init__(self) -> None:
        if isinstance(self.nodes, Mapping):
            nodes = dict(self.nodes)
        else:
            nodes = {}
            for node in self.nodes:
                if node.id in nodes:
                    raise ValueError(f'duplicate node id "{node.id}"')
                nodes[node.id] = node
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "relations", tuple(self.relations))

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.nodes

    def __iter__(self) -> Iterator[ObjectNode]:
        return iter(self.nodes.values())

    def node(self, node_id: str) -> ObjectNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise ValueError(f'unknown object id "{node_id}"') from None

    def human_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self if n.is_human)


def validate_scene(graph: SceneGraph) -> list[Violation]:
    """Check all scene-graph invariants; empty list means the graph is valid."""
    violations: list[Violation] = []
    for node in graph:
        if not node.id:
            violations.append(Violation("empty id", (node.id,), "node id must be non-empty"))
        if min(node.bbox_extent) <= 0:
            violations.append(
                Violation(
                    "non-positive extent",
                    (node.id,),
                    f'node "{node.id}" has bbox_extent {node.bbox_extent}; every component must be > 0',
                )
            )
    seen: set[tuple[str, str, str]] = set()
    for rel in graph.relations:
        endpoint_ok = True
        for endpoint in (rel.head_id, rel.tail_id):
            if endpoint not in graph:
                endpoint_ok = False
                violations.append(
                    Violation(
                        "dangling endpoint",
                        (endpoint,),
                        f'relation ({rel.name}, {rel.head_id}, {rel.tail_id}) references unknown id "{endpoint}"',
                    )
                )
        if rel.head_id == rel.tail_id:
            violations.append(
                Violation(
                    "self loop",
                    (rel.head_id,),
                    f'relation "{rel.name}" must connect two distinct nodes',
                )
            )
        if rel.triple in seen:
            violations.append(
                Violation(
                    "duplicate relation",
                    (rel.head_id, rel.tail_id),
                    f"duplicate relation triple {rel.triple}",
                )
            )
        seen.add(rel.triple)
        if (
            rel.kind is RelationKind.ACTIVITY
            and endpoint_ok
            and not graph.node(rel.head_id).is_human
        ):
            violations.append(
                Violation(
                    "activity head must be human",
                    (rel.head_id,),
                    f'activity relation "{rel.name}" originates at "{rel.head_id}" '
                    f'(tag "{graph.node(rel.head_id).tag}"), not at a human node',
                )
            )
    return violations


def load_scene(document: bytes | str, *, strict: bool = False) -> SceneGraph:
    """Parse and validate a scene JSON document.

    Raises FormatError with a path into the document for syntax errors,
    missing fields, duplicate ids, dangling endpoints, and invariant
    violations. Unknown keys are rejected in strict mode, warned otherwise.
    """
    data = parse_document(document, what="scene document")
    check_keys(
        data,
        required=("nodes",),
        optional=("relations", "schema_version"),
        path="$",
        strict=strict,
    )
    require_version(data, "$", SCENE_SCHEMA_VERSION)

    raw_nodes = data["nodes"]
    if not isinstance(raw_nodes, list):
        raise FormatError("expected a list of node objects", "nodes")
    nodes: dict[str, ObjectNode] = {}
    for i, raw in enumerate(raw_nodes):
        path = f"nodes[{i}]"
        check_keys(
            raw,
            required=("id", "tag", "bbox_center", "bbox_extent"),
            optional=("affordances", "attributes"),
            path=path,
            strict=strict,
        )
        node_id = string(raw["id"], f"{path}.id")
        extent = vector(raw["bbox_extent"], f"{path}.bbox_extent", 3)
        if min(extent) <= 0:
            raise FormatError("every component must be > 0", f"{path}.bbox_extent")
        if node_id in nodes:
            raise FormatError(f'duplicate node id "{node_id}"', f"{path}.id")
        nodes[node_id] = ObjectNode(
            id=node_id,
            tag=string(raw["tag"], f"{path}.tag"),
            bbox_center=vector(raw["bbox_center"], f"{path}.bbox_center", 3),
            bbox_extent=extent,
            affordances=frozenset(string_list(raw.get("affordances", []), f"{path}.affordances")),
            attributes=frozenset(string_list(raw.get("attributes", []), f"{path}.attributes")),
        )

    raw_relations = data.get("relations", [])
    if not isinstance(raw_relations, list):
        raise FormatError("expected a list of relation objects", "relations")
    relations: list[Relation] = []
    seen: set[tuple[str, str, str]] = set()
    for j, raw in enumerate(raw_relations):
        path = f"relations[{j}]"
        check_keys(
            raw,
            required=("name", "head", "tail", "kind"),
            optional=(),
            path=path,
            strict=strict,
        )
        name = string(raw["name"], f"{path}.name")
        head = string(raw["head"], f"{path}.head")
        tail = string(raw["tail"], f"{path}.tail")
        kind_value = string(raw["kind"], f"{path}.kind")
        try:
            kind = RelationKind(kind_value)
        except ValueError:
            valid = ", ".join(k.value for k in RelationKind)
            raise FormatError(f'unknown kind "{kind_value}" (valid: {valid})', f"{path}.kind") from None
        for field_name, endpoint in (("head", head), ("tail", tail)):
            if endpoint not in nodes:
                raise FormatError(
                    f'relation endpoint "{endpoint}" does not name a node',
                    f"{path}.{field_name}",
                )
        if head == tail:
            raise FormatError("relation endpoints must differ", path)
        if (name, head, tail) in seen:
            raise FormatError(f"duplicate relation triple ({name}, {head}, {tail})", path)
        seen.add((name, head, tail))
        if kind is RelationKind.ACTIVITY and not nodes[head].is_human:
            raise FormatError(
                f'activity relations must originate at a node tagged "{HUMAN_TAG}"',
                f"{path}.head",
            )
        relations.append(Relation(name=name, head_id=head, tail_id=tail, kind=kind))

    return SceneGraph(nodes=nodes, relations=tuple(relations))


def node_to_dict(node: ObjectNode) -> dict:
    return {
        "id": node.id,
        "tag": node.tag,
        "bbox_center": list(node.bbox_center),
        "bbox_extent": list(node.bbox_extent),
        "affordances": sorted(node.affordances),
        "attributes": sorted(node.attributes),
    }


def scene_to_dict(graph: SceneGraph) -> dict:
    return {
        "schema_version": SCENE_SCHEMA_VERSION,
        "nodes": [node_to_dict(n) for n in graph],
        "relations": [
            {"name": r.name, "head": r.head_id, "tail": r.tail_id, "kind": r.kind.value}
            for r in graph.relations
        ],
    }


def serialize_scene(graph: SceneGraph) -> str:
    """Canonical JSON for a scene; ``load_scene`` of the output reproduces the graph."""
    return canonical_json(scene_to_dict(graph))


def distance_to_object(point: Iterable[float], node: ObjectNode) -> float:
    """Euclidean distance from ``point`` to the closest point of the node's box.

    0 if the point is inside or on the box.
    """
    p = tuple(float(c) for c in point)
    lo, hi = node.bbox_min, node.bbox_max
    total = 0.0
    for c, a, b in zip(p, lo, hi):
        gap = max(a - c, 0.0, c - b)
        total += gap * gap
    return math.sqrt(total)


def objects_within_radius(graph: SceneGraph, point: Iterable[float], radius: float) -> set[str]:
    """Ids of all nodes whose box lies within ``radius`` meters of ``point``."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    p = tuple(float(c) for c in point)
    return {node.id for node in graph if distance_to_object(p, node) <= radius}
