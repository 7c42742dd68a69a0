from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from socioplan import (
    Trajectory,
    describe_object,
    distance_to_object,
    induce_partial_graph,
    insert_human,
    relevant_objects,
    render_context_text,
    resample,
    validate_scene,
)
from socioplan.scene_graph import ObjectNode, SceneGraph
from socioplan.trajectory_context import validate_trajectory

from conftest import make_seated_human_spec, make_small_scene


class TestTrajectory:
    def test_needs_at_least_one_waypoint(self):
        with pytest.raises(ValueError, match="at least one"):
            Trajectory(())

    def test_duplicate_waypoints_flagged_not_rejected(self):
        trajectory = Trajectory(((0, 0, 0), (0, 0, 0), (1, 0, 0)))
        violations = validate_trajectory(trajectory)
        assert len(violations) == 1
        assert violations[0].rule == "duplicate waypoint"

    def test_resample_spacing_bound(self):
        trajectory = Trajectory(((0, 0, 0), (1.0, 0, 0)))
        dense = resample(trajectory, 0.25)
        gaps = [math.dist(a, b) for a, b in zip(dense.waypoints, dense.waypoints[1:])]
        assert all(g <= 0.25 + 1e-12 for g in gaps)
        assert dense.waypoints[0] == (0, 0, 0)
        assert dense.waypoints[-1] == (1.0, 0, 0)


class TestRelevantObjects:
    def test_path_near_bed_and_armchair_far_from_tv(self, small_scene):
        trajectory = Trajectory(((0.8, 2.0, 0.0), (2.0, 1.2, 0.0), (3.4, 0.2, 0.0)))
        radius = 1.5
        # Brute-force oracle: union of per-waypoint distance checks over the
        # densified trajectory.
        dense = resample(trajectory, 0.25)
        expected = {
            node.id
            for node in small_scene
            for point in dense.waypoints
            if distance_to_object(point, node) <= radius
        }
        result = relevant_objects(small_scene, trajectory, radius)
        assert set(result) == expected == {"bed", "armchair"}

    def test_covering_radius_is_deterministic(self, small_scene):
        trajectory = Trajectory(((0.0, 0.0, 0.0),))
        first = relevant_objects(small_scene, trajectory, 100.0)
        assert set(first) == set(small_scene.nodes)
        assert first == relevant_objects(small_scene, trajectory, 100.0)

    def test_single_waypoint_at_bed_center(self, small_scene):
        trajectory = Trajectory((small_scene.node("bed").bbox_center,))
        assert relevant_objects(small_scene, trajectory, 0.05) == ("bed",)

    def test_order_is_first_appearance_then_id(self, small_scene):
        trajectory = Trajectory(((3.4, 0.2, 0.0), (0.8, 2.0, 0.0)))
        assert relevant_objects(small_scene, trajectory, 1.5) == ("armchair", "bed")

    @given(
        waypoints=st.lists(
            st.tuples(st.floats(0, 5), st.floats(0, 5), st.just(0.0)), min_size=1, max_size=5
        ),
        radius=st.floats(0.1, 4.0),
    )
    def test_set_invariant_under_reversal(self, waypoints, radius):
        graph = make_small_scene()
        forward = Trajectory(tuple(waypoints))
        backward = Trajectory(tuple(reversed(waypoints)))
        # Disable densification so both directions sample identical points.
        spacing = math.inf
        assert set(relevant_objects(graph, forward, radius, max_spacing=spacing)) == set(
            relevant_objects(graph, backward, radius, max_spacing=spacing)
        )

    def test_resampled_reversal_on_fixture(self, small_scene):
        waypoints = ((0.8, 2.0, 0.0), (3.4, 0.2, 0.0))
        forward = relevant_objects(small_scene, Trajectory(waypoints), 1.5)
        backward = relevant_objects(small_scene, Trajectory(tuple(reversed(waypoints))), 1.5)
        assert set(forward) == set(backward)

    def test_non_positive_radius_rejected(self, small_scene):
        with pytest.raises(ValueError, match="> 0"):
            relevant_objects(small_scene, Trajectory(((0, 0, 0),)), 0.0)


class TestInducePartialGraph:
    def test_attached_human_is_pulled_in(self, scene_with_human):
        partial = induce_partial_graph(scene_with_human, {"bed", "armchair"})
        assert set(partial.nodes) == {"bed", "armchair", "human_1"}
        triples = {r.triple for r in partial.relations}
        assert ("sitting on", "human_1", "bed") in triples
        # tv is outside the requested set, so the watching edge must not dangle
        assert all("tv" not in (r.head_id, r.tail_id) for r in partial.relations)
        assert validate_scene(partial) == []

    def test_all_ids_reproduces_graph(self, scene_with_human):
        partial = induce_partial_graph(scene_with_human, set(scene_with_human.nodes))
        assert partial == scene_with_human

    def test_isolated_node(self, small_scene):
        partial = induce_partial_graph(small_scene, {"tv"})
        assert set(partial.nodes) == {"tv"}
        assert partial.relations == ()

    def test_unknown_id_rejected(self, small_scene):
        with pytest.raises(ValueError, match="ghost"):
            induce_partial_graph(small_scene, {"ghost"})

    @given(
        ids=st.sets(st.sampled_from(["bed", "tv", "armchair", "human_1"]), min_size=1)
    )
    def test_partial_graph_always_valid(self, ids):
        graph = insert_human(make_small_scene(), make_seated_human_spec())
        assert validate_scene(induce_partial_graph(graph, ids)) == []


class TestDescribeObject:
    def test_inverted_relation_flagged(self, scene_with_human):
        description = describe_object(scene_with_human, "bed")
        # bed is the tail of both edges, so both carry the inverted flag
        assert ("sitting on", "human", True) in description.relations
        assert ("next to", "armchair", True) in description.relations
        # while the armchair (head of "next to") sees it un-inverted
        head_side = describe_object(scene_with_human, "armchair")
        assert ("next to", "bed", False) in head_side.relations

    def test_empty_sets_render_as_empty_lists(self, scene_with_human):
        text = render_context_text(
            induce_partial_graph(scene_with_human, {"human_1"}),
            Trajectory(((0, 0, 0),)),
            [],
        )
        assert "affordances: []" in text
        assert "attributes: []" in text

    def test_unknown_id_rejected(self, small_scene):
        with pytest.raises(ValueError, match="ghost"):
            describe_object(small_scene, "ghost")

    def test_tag_collision_appends_ids(self):
        from socioplan.scene_graph import Relation, RelationKind

        graph = SceneGraph(
            nodes=[
                ObjectNode("chair_a", "chair", (0, 0, 0), (1, 1, 1)),
                ObjectNode("chair_b", "chair", (3, 0, 0), (1, 1, 1)),
                ObjectNode("table", "table", (1.5, 0, 0), (1, 1, 1)),
            ],
            relations=[Relation("next to", "table", "chair_a", RelationKind.SPATIAL)],
        )
        description = describe_object(graph, "table")
        assert ("next to", "chair[chair_a]", False) in description.relations


class TestRenderContextText:
    def test_preference_appears_verbatim(self, scene_with_human):
        preference = "Don't disturb anyone watching a football match"
        text = render_context_text(
            scene_with_human, Trajectory(((0.8, 2.0, 0.0), (3.4, 0.2, 0.0))), [preference]
        )
        assert preference in text

    def test_empty_preferences_marker(self, small_scene):
        text = render_context_text(small_scene, Trajectory(((0, 0, 0),)), [])
        assert text.rstrip().endswith("PREFERENCES\n(none)")

    def test_identical_inputs_identical_bytes(self, scene_with_human):
        trajectory = Trajectory(((0.8, 2.0, 0.0), (3.4, 0.2, 0.0)))
        a = render_context_text(scene_with_human, trajectory, ["p"])
        b = render_context_text(scene_with_human, trajectory, ["p"])
        assert a == b

    def test_every_relevant_object_appears_exactly_once(self, scene_with_human):
        trajectory = Trajectory(((0.8, 2.0, 0.0), (3.4, 0.2, 0.0)))
        ids = relevant_objects(scene_with_human, trajectory, 1.5)
        partial = induce_partial_graph(scene_with_human, ids)
        text = render_context_text(partial, trajectory, [])
        for node_id in ids:
            assert text.count(f"- object_id: {node_id}\n") == 1

    def test_waypoints_use_three_decimals(self, small_scene):
        text = render_context_text(small_scene, Trajectory(((1.23456, 2, 0),)), [])
        assert "- [1.235, 2.000, 0.000]" in text
