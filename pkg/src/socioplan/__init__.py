"""socioplan: socially aware trajectory planning over human-augmented 3D
semantic scene graphs.

Pipeline: load a scene graph, insert humans with spatial and activity
relations, extract the trajectory-relevant partial graph, assess each object
with a (cost >= 1, clearance >= 0 m) pair via an LLM, rule model, or replay
fixtures, synthesize a planar cost field, and search it for a minimum-cost
path. A scenario runner compares graph-variant conditions end to end.
"""

from .cost_assessment import (
    Assessment,
    AssessmentStore,
    CostClearance,
    HttpChatTransport,
    LlmAssessor,
    ReplayAssessor,
    RetryPolicy,
    RuleAssessor,
    assess,
    build_prompt,
    llm_assess,
    load_assessment_fixtures,
    parse_assessment,
    replay_assess,
    rule_based_assess,
    validate_assessment,
)
from .cost_field import (
    ActivityZone,
    Contribution,
    Costmap,
    FieldSpec,
    OrientedRectFootprint,
    RectFootprint,
    combined_cost,
    costmap_from_text,
    costmap_to_text,
    field_spec_from_assessment,
    footprint_of,
    make_activity_zones,
    point_cost,
    rasterize,
)
from .human_augmentation import (
    Condition,
    HumanSpec,
    attach_relation,
    derive_condition_variant,
    insert_human,
)
from .jsonio import FormatError
from .planner import (
    Path,
    PlanIteration,
    PlanRequest,
    PlanningError,
    iterate_plan,
    path_cost,
    plan,
)
from .render import render_svg
from .scenario_runner import (
    RunReport,
    Scenario,
    ScenarioError,
    compare_conditions,
    comparison_dict,
    load_report,
    load_scenario,
    report_to_json,
    run_scenario,
)
from .scene_graph import (
    ObjectNode,
    Relation,
    RelationKind,
    SceneGraph,
    Violation,
    distance_to_object,
    load_scene,
    objects_within_radius,
    serialize_scene,
    validate_scene,
)
from .trajectory_context import (
    ObjectDescription,
    Trajectory,
    describe_object,
    induce_partial_graph,
    relevant_objects,
    render_context_text,
    resample,
    validate_trajectory,
)

__version__ = "0.1.0"
