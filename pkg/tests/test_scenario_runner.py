from __future__ import annotations

import json
import shutil

import pytest

from socioplan import (
    Condition,
    CostClearance,
    compare_conditions,
    comparison_dict,
    load_report,
    load_scene,
    load_scenario,
    render_svg,
    report_to_json,
    run_scenario,
)
from socioplan.cost_field import footprint_of
from socioplan.jsonio import FormatError
from socioplan.scenario_runner import (
    ScenarioError,
    human_footprint,
    min_distance_to_footprint,
    serialize_scenario,
)

from conftest import DATA_DIR


@pytest.fixture(scope="module")
def scenario():
    return load_scenario(DATA_DIR / "bedroom_scenario.json")


@pytest.fixture(scope="module")
def replay_report(scenario):
    return run_scenario(scenario)


class TestLoadScenario:
    def test_loads_canonical_fixture(self, scenario):
        assert scenario.name == "bedroom"
        assert scenario.conditions == (
            Condition.NO_HUMAN,
            Condition.HUMAN_NO_RELATIONS,
            Condition.HUMAN_WITH_RELATIONS,
        )
        assert scenario.query_radius_m == 1.5
        assert scenario.assessor.kind == "replay"

    def test_missing_scene_file_fails_before_planning(self, tmp_path):
        document = json.loads((DATA_DIR / "bedroom_scenario.json").read_text())
        document["scene"] = "nowhere.json"
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(document))
        shutil.copy(DATA_DIR / "bedroom_assessments.json", tmp_path)
        with pytest.raises(FormatError, match="scene file not found"):
            load_scenario(path)

    def test_empty_conditions_rejected(self, tmp_path):
        document = json.loads((DATA_DIR / "bedroom_scenario.json").read_text())
        document["conditions"] = []
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(document))
        with pytest.raises(FormatError, match="non-empty"):
            load_scenario(path)

    def test_start_outside_bounds_rejected(self, tmp_path):
        document = json.loads((DATA_DIR / "bedroom_scenario.json").read_text())
        document["start"] = [-5.0, 0.0]
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(document))
        with pytest.raises(FormatError, match="outside map.bounds"):
            load_scenario(path)

    def test_round_trip_in_place(self, tmp_path):
        for name in (
            "bedroom_scene.json",
            "bedroom_assessments.json",
            "bedroom_scenario.json",
        ):
            shutil.copy(DATA_DIR / name, tmp_path)
        first = load_scenario(tmp_path / "bedroom_scenario.json")
        text = serialize_scenario(first)
        (tmp_path / "again.json").write_text(text, encoding="utf-8")
        second = load_scenario(tmp_path / "again.json")
        assert second == first
        assert serialize_scenario(second) == text


class TestRunScenario:
    def test_replay_report_matches_recorded_rows(self, replay_report):
        assert [r.condition for r in replay_report.conditions] == [
            Condition.NO_HUMAN,
            Condition.HUMAN_NO_RELATIONS,
            Condition.HUMAN_WITH_RELATIONS,
        ]
        by_condition = {r.condition: r.assessment.entries for r in replay_report.conditions}
        assert by_condition[Condition.NO_HUMAN] == {
            "bed": CostClearance(1.0, 0.5),
            "armchair": CostClearance(2.0, 1.5),
        }
        assert by_condition[Condition.HUMAN_NO_RELATIONS] == {
            "bed": CostClearance(2.0, 0.5),
            "human": CostClearance(10.0, 2.0),
            "armchair": CostClearance(3.0, 1.0),
        }
        assert by_condition[Condition.HUMAN_WITH_RELATIONS] == {
            "bed": CostClearance(3.0, 1.5),
            "human": CostClearance(5.0, 2.0),
            "armchair": CostClearance(1.0, 0.0),
        }

    def test_paths_start_and_end_at_request_cells(self, scenario, replay_report):
        for result in replay_report.conditions:
            costmap = result.costmap
            assert result.path.cells[0] == costmap.cell_at(scenario.start)
            assert result.path.cells[-1] == costmap.cell_at(scenario.goal)

    def test_rules_assessor_releases_the_armchair(self, scenario):
        report = run_scenario(scenario, assessor_kind="rules")
        scene = load_scene(scenario.scene_path().read_bytes())
        armchair = footprint_of(scene.node("armchair"))
        distance = {
            r.condition: min_distance_to_footprint(r.path.polyline, armchair)
            for r in report.conditions
        }
        assert (
            distance[Condition.HUMAN_WITH_RELATIONS] <= distance[Condition.HUMAN_NO_RELATIONS]
        )

    def test_min_distance_stat_present_with_human(self, scenario, replay_report):
        footprint = human_footprint(scenario)
        for result in replay_report.conditions:
            stat = result.stats.min_distance_to_human_m
            assert stat == pytest.approx(
                min_distance_to_footprint(result.path.polyline, footprint)
            )

    def test_replay_with_missing_row_is_annotated(self, tmp_path):
        for name in ("bedroom_scene.json", "bedroom_scenario.json"):
            shutil.copy(DATA_DIR / name, tmp_path)
        fixtures = json.loads((DATA_DIR / "bedroom_assessments.json").read_text())
        del fixtures["assessments"]["bedroom/no_human"]
        (tmp_path / "bedroom_assessments.json").write_text(json.dumps(fixtures))
        scenario = load_scenario(tmp_path / "bedroom_scenario.json")
        with pytest.raises(ScenarioError, match='condition "no_human", stage "assess"'):
            run_scenario(scenario)

    def test_byte_reproducible(self, scenario):
        first = run_scenario(scenario)
        second = run_scenario(scenario)
        assert report_to_json(first) == report_to_json(second)


class TestReportSerialization:
    def test_round_trip_identity(self, replay_report):
        text = report_to_json(replay_report)
        loaded = load_report(text)
        assert report_to_json(loaded) == text
        assert load_report(report_to_json(loaded)) == loaded

    def test_shipped_report_fixture_round_trips(self):
        text = (DATA_DIR / "bedroom_report.json").read_text(encoding="utf-8")
        assert report_to_json(load_report(text)) == text

    def test_timing_is_not_serialized(self, replay_report):
        data = json.loads(report_to_json(replay_report))
        assert "timing" not in json.dumps(data)
        assert all(r.timing_s is not None for r in replay_report.conditions)


class TestCompareConditions:
    def test_table_matches_recorded_values(self, replay_report):
        table = compare_conditions(replay_report)
        lines = table.splitlines()
        assert lines[0].split() == ["Condition", "armchair", "bed", "human"]
        import re

        rows = {re.split(r"\s{2,}", line)[0]: re.split(r"\s{2,}", line)[1:] for line in lines[1:]}
        assert rows["No Human"] == ["2 (1.5)", "1 (0.5)", "-"]
        assert rows["Human w/out relations"] == ["3 (1)", "2 (0.5)", "10 (2)"]
        assert rows["Human w/ relations"] == ["1 (0)", "3 (1.5)", "5 (2)"]

    def test_single_condition_rejected(self, replay_report):
        single = type(replay_report)(
            scenario_name=replay_report.scenario_name,
            scene=replay_report.scene,
            conditions=replay_report.conditions[:1],
        )
        with pytest.raises(ValueError, match=">= 2"):
            compare_conditions(single)

    def test_union_semantics_with_dash(self, replay_report):
        table = compare_conditions(replay_report)
        assert "-" in table  # human column under No Human

    def test_json_companion_round_trips_numbers(self, replay_report):
        data = comparison_dict(replay_report)
        text = json.dumps(data)
        parsed = json.loads(text)
        for entry, result in zip(parsed["conditions"], replay_report.conditions):
            for object_id, cc in result.assessment.entries.items():
                assert entry["entries"][object_id]["cost"] == cc.cost
                assert entry["entries"][object_id]["clearance"] == cc.clearance


class TestRenderSvg:
    def test_empty_map_renders(self):
        from socioplan.cost_field import FieldSpec, rasterize
        from socioplan.scene_graph import SceneGraph

        costmap = rasterize(FieldSpec(()), (), ((0, 0), (1, 1)), 0.25)
        svg = render_svg(costmap, [], SceneGraph(nodes={}), labels=[])
        assert svg.startswith("<svg ")
        assert svg.rstrip().endswith("</svg>")

    def test_fixture_report_has_paths_and_labels(self, replay_report):
        svg = render_svg(
            replay_report.conditions[-1].costmap,
            [r.path for r in replay_report.conditions],
            replay_report.scene,
            labels=[r.condition.label for r in replay_report.conditions],
        )
        assert svg.count("<polyline") == 3
        for tag in ("bed", "tv", "armchair", "human"):
            assert f">{tag}</text>" in svg

    def test_byte_deterministic(self, replay_report):
        args = (
            replay_report.conditions[-1].costmap,
            [r.path for r in replay_report.conditions],
            replay_report.scene,
        )
        labels = [r.condition.label for r in replay_report.conditions]
        assert render_svg(*args, labels=labels) == render_svg(*args, labels=labels)

    def test_label_count_mismatch_rejected(self, replay_report):
        with pytest.raises(ValueError, match="label"):
            render_svg(
                replay_report.conditions[-1].costmap,
                [r.path for r in replay_report.conditions],
                replay_report.scene,
                labels=["just one"],
            )
