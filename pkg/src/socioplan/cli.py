"""Command-line interface: validate, assess, plan, compare, render."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FilePath

from .cost_assessment import AssessmentError
from .human_augmentation import Condition, derive_condition_variant, insert_human
from .jsonio import FormatError, canonical_json
from .planner import PlanningError
from .render import render_svg
from .scenario_runner import (
    ScenarioError,
    build_assessor,
    compare_conditions,
    comparison_dict,
    load_report,
    load_scenario,
    report_to_json,
    run_scenario,
)
from .scene_graph import load_scene, validate_scene
from .trajectory_context import Trajectory, induce_partial_graph, relevant_objects
from .cost_assessment import assess


def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--assessor",
        choices=("rules", "llm", "replay"),
        help="override the scenario's assessor",
    )
    parser.add_argument(
        "--keep-spatial",
        action="store_true",
        help="keep human spatial relations in the human_no_relations condition",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socioplan",
        description="Plan trajectories through domestic scenes described by "
        "human-augmented 3D semantic scene graphs.",
    )
    parser.add_argument(
        "--strict", action="store_true", help="reject unknown keys in input files"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a scene file")
    p.add_argument("scene", type=FilePath)
    _add_format(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("assess", help="assess costs for a scenario without planning")
    p.add_argument("scenario", type=FilePath)
    p.add_argument(
        "--condition",
        action="append",
        choices=[c.value for c in Condition],
        help="restrict to specific conditions (repeatable)",
    )
    _add_run_options(p)
    _add_format(p)
    p.set_defaults(func=_cmd_assess)

    p = sub.add_parser("plan", help="run a scenario and write the report")
    p.add_argument("scenario", type=FilePath)
    p.add_argument("-o", "--out", type=FilePath, help="write report JSON here")
    _add_run_options(p)
    _add_format(p)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("compare", help="run a scenario and tabulate conditions")
    p.add_argument("scenario", type=FilePath)
    _add_run_options(p)
    _add_format(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("render", help="render a report to SVG")
    p.add_argument("report", type=FilePath)
    p.add_argument("-o", "--out", type=FilePath, required=True)
    _add_format(p)
    p.set_defaults(func=_cmd_render)

    return parser


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        graph = load_scene(args.scene.read_bytes(), strict=args.strict)
    except FileNotFoundError:
        raise FormatError(f"scene file not found: {args.scene}") from None
    violations = validate_scene(graph)
    if args.format == "json":
        payload = {
            "ok": not violations,
            "violations": [
                {"rule": v.rule, "ids": list(v.ids), "message": v.message} for v in violations
            ],
        }
        print(canonical_json(payload), end="")
    else:
        if violations:
            for v in violations:
                print(f"{v.rule}: {v.message}")
        else:
            print(f"OK: {len(graph.nodes)} nodes, {len(graph.relations)} relations")
    return 1 if violations else 0


def _cmd_assess(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario, strict=args.strict)
    conditions = scenario.conditions
    if args.condition:
        conditions = tuple(Condition(v) for v in args.condition)
    scene = load_scene(scenario.scene_path().read_bytes(), strict=args.strict)
    base = insert_human(scene, scenario.human) if scenario.human is not None else scene
    if scenario.waypoints is not None:
        trajectory = Trajectory(scenario.waypoints)
    else:
        s, g = scenario.start, scenario.goal
        trajectory = Trajectory(((s[0], s[1], 0.0), (g[0], g[1], 0.0)))

    output = []
    for condition in conditions:
        variant = derive_condition_variant(base, condition, keep_spatial=args.keep_spatial)
        ids = relevant_objects(variant, trajectory, scenario.query_radius_m)
        partial = induce_partial_graph(variant, ids)
        assessed = ids + tuple(i for i in sorted(partial.nodes) if i not in set(ids))
        port = build_assessor(scenario, condition, args.assessor)
        assessment = assess(port, partial, trajectory, assessed, scenario.preferences)
        output.append((condition, assessment))

    if args.format == "json":
        payload = {
            "scenario": scenario.name,
            "conditions": [
                {
                    "condition": condition.value,
                    "assessor": assessment.provenance.assessor,
                    "entries": {
                        object_id: {"cost": cc.cost, "clearance": cc.clearance}
                        for object_id, cc in sorted(assessment.entries.items())
                    },
                }
                for condition, assessment in output
            ],
        }
        print(canonical_json(payload), end="")
    else:
        for condition, assessment in output:
            print(f"condition: {condition.value} (assessor: {assessment.provenance.assessor})")
            for object_id, cc in sorted(assessment.entries.items()):
                print(f"  {object_id}: cost {cc.cost:g}, clearance {cc.clearance:g} m")
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario, strict=args.strict)
    report = run_scenario(
        scenario,
        assessor_kind=args.assessor,
        keep_spatial=args.keep_spatial,
        strict=args.strict,
    )
    text = report_to_json(report)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    if args.format == "json" and not args.out:
        print(text, end="")
    else:
        for result in report.conditions:
            stats = result.stats
            human = (
                f", min dist to human {stats.min_distance_to_human_m:.3f} m"
                if stats.min_distance_to_human_m is not None
                else ""
            )
            print(
                f"{result.condition.value}: total cost {stats.total_cost:.3f}, "
                f"length {stats.length_m:.3f} m, rounds {result.rounds}{human}"
            )
        if args.out:
            print(f"report written to {args.out}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario, strict=args.strict)
    report = run_scenario(
        scenario,
        assessor_kind=args.assessor,
        keep_spatial=args.keep_spatial,
        strict=args.strict,
    )
    if args.format == "json":
        print(canonical_json(comparison_dict(report)), end="")
    else:
        print(compare_conditions(report), end="")
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    try:
        report = load_report(args.report.read_bytes(), strict=args.strict)
    except FileNotFoundError:
        raise FormatError(f"report file not found: {args.report}") from None
    if not report.conditions:
        raise ScenarioError("report contains no conditions")
    # Overlay every condition's path on the last condition's costmap (the
    # richest field when conditions are ordered none -> full).
    svg = render_svg(
        report.conditions[-1].costmap,
        [r.path for r in report.conditions],
        report.scene,
        labels=[r.condition.label for r in report.conditions],
    )
    args.out.write_text(svg, encoding="utf-8")
    if args.format == "json":
        print(canonical_json({"ok": True, "out": str(args.out)}), end="")
    else:
        print(f"svg written to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ScenarioError, AssessmentError, PlanningError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
