"""Insert humans into a static scene graph and derive the ablation variants
that isolate the effect of human modeling on planning."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .scene_graph import HUMAN_TAG, ObjectNode, Relation, RelationKind, SceneGraph, Vec3


class Condition(enum.Enum):
    """Graph variant used for a run: no human, human without relations, or full."""

    NO_HUMAN = "no_human"
    HUMAN_NO_RELATIONS = "human_no_relations"
    HUMAN_WITH_RELATIONS = "human_with_relations"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    Condition.NO_HUMAN: "No Human",
    Condition.HUMAN_NO_RELATIONS: "Human w/out relations",
    Condition.HUMAN_WITH_RELATIONS: "Human w/ relations",
}


@dataclass(frozen=True)
class HumanSpec:
    """Placement of one human: body box plus the relations anchoring them.

    ``spatial_relations`` describe physical arrangement ("sitting on", bed);
    ``activity_relations`` describe ongoing activities ("watching", tv).
    Each entry is a (verb, target id) pair; targets must be existing
    non-human nodes.
    """

    id: str
    bbox_center: Vec3
    bbox_extent: Vec3
    spatial_relations: tuple[tuple[str, str], ...] = ()
    activity_relations: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "bbox_center", tuple(float(c) for c in self.bbox_center))
        object.__setattr__(self, "bbox_extent", tuple(float(c) for c in self.bbox_extent))
        object.__setattr__(
            self, "spatial_relations", tuple((v, t) for v, t in self.spatial_relations)
        )
        object.__setattr__(
            self, "activity_relations", tuple((v, t) for v, t in self.activity_relations)
        )


def insert_human(graph: SceneGraph, spec: HumanSpec) -> SceneGraph:
    """Return a new graph with a human node and its relations added.

    The input graph is never mutated. Raises ValueError for a duplicate id,
    a missing or human-tagged target, or an empty relation verb.
    """
    if not spec.id:
        raise ValueError("human id must be non-empty")
    if spec.id in graph:
        raise ValueError(f'node id "{spec.id}" already exists in the scene')
    relations = list(graph.relations)
    for kind, pairs in (
        (RelationKind.SPATIAL, spec.spatial_relations),
        (RelationKind.ACTIVITY, spec.activity_relations),
    ):
        for verb, target in pairs:
            if not verb:
                raise ValueError(f'empty relation verb for target "{target}"')
            if target not in graph:
                raise ValueError(f'human relation target "{target}" does not name a node')
            if graph.node(target).is_human:
                raise ValueError(f'human relation target "{target}" must be a non-human node')
            relations.append(Relation(name=verb, head_id=spec.id, tail_id=target, kind=kind))
    human = ObjectNode(
        id=spec.id,
        tag=HUMAN_TAG,
        bbox_center=spec.bbox_center,
        bbox_extent=spec.bbox_extent,
    )
    return SceneGraph(nodes={**graph.nodes, spec.id: human}, relations=tuple(relations))


def attach_relation(graph: SceneGraph, relation: Relation) -> SceneGraph:
    """Return a graph with ``relation`` added; a duplicate triple is a no-op."""
    for endpoint in (relation.head_id, relation.tail_id):
        if endpoint not in graph:
            raise ValueError(f'relation endpoint "{endpoint}" does not name a node')
    if relation.head_id == relation.tail_id:
        raise ValueError("relation endpoints must differ")
    if relation.kind is RelationKind.ACTIVITY and not graph.node(relation.head_id).is_human:
        raise ValueError("activity head must be human")
    if any(r.triple == relation.triple for r in graph.relations):
        return graph
    return SceneGraph(nodes=graph.nodes, relations=graph.relations + (relation,))


def derive_condition_variant(
    graph: SceneGraph, condition: Condition, *, keep_spatial: bool = False
) -> SceneGraph:
    """Project the graph onto an experimental condition.

    NO_HUMAN drops human nodes and every relation touching them.
    HUMAN_NO_RELATIONS keeps human nodes but strips their relations; with
    ``keep_spatial`` only activity relations are stripped.
    HUMAN_WITH_RELATIONS returns the graph unchanged.
    """
    if condition is Condition.HUMAN_WITH_RELATIONS:
        return graph
    human_ids = set(graph.human_ids())
    if condition is Condition.NO_HUMAN:
        nodes = {i: n for i, n in graph.nodes.items() if i not in human_ids}
        relations = tuple(
            r
            for r in graph.relations
            if r.head_id not in human_ids and r.tail_id not in human_ids
        )
        return SceneGraph(nodes=nodes, relations=relations)

    def keep(r: Relation) -> bool:
        if r.head_id not in human_ids and r.tail_id not in human_ids:
            return True
        return keep_spatial and r.kind is not RelationKind.ACTIVITY

    return SceneGraph(nodes=graph.nodes, relations=tuple(r for r in graph.relations if keep(r)))
