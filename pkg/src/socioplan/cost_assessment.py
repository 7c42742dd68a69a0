"""Assessors: map (partial graph, trajectory, preferences) to a validated
per-object (cost, clearance) assessment.

Three interchangeable implementations sit behind one port contract: an
LLM-backed assessor speaking an OpenAI-compatible chat endpoint, a
deterministic rule model, and a replay assessor serving recorded fixtures.
Cost is dimensionless and >= 1 (1 = no impact); clearance is meters and >= 0
(0 = no influence beyond the object itself).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Protocol, Sequence

import requests

from .human_augmentation import Condition
from .jsonio import FormatError, canonical_json, check_keys, parse_document, require_version
from .scene_graph import RelationKind, SceneGraph, Violation
from .trajectory_context import Trajectory, render_context_text

FIXTURE_SCHEMA_VERSION = 1

COST_FLOOR = 1.0
CLEARANCE_FLOOR = 0.0


class AssessmentError(Exception):
    """Base class for assessor failures."""


class TransportError(AssessmentError):
    """The completion endpoint could not be reached or answered garbage."""


class ResponseFormatError(AssessmentError):
    """The response was not the required JSON shape."""


class ValueOutOfRangeError(AssessmentError):
    """A cost or clearance value violates its lower bound."""

    def __init__(self, object_id: str, field_name: str, value: float) -> None:
        bound = ">= 1" if field_name == "cost" else ">= 0"
        super().__init__(f'{field_name} for "{object_id}" is {value!r}, must be {bound}')
        self.object_id = object_id
        self.field_name = field_name
        self.value = value


class CoverageError(AssessmentError):
    """The response ids do not match the requested object set exactly."""

    def __init__(self, missing: Iterable[str], extra: Iterable[str]) -> None:
        self.missing = tuple(sorted(missing))
        self.extra = tuple(sorted(extra))
        parts = []
        if self.missing:
            parts.append(f"missing ids: {list(self.missing)}")
        if self.extra:
            parts.append(f"extra ids: {list(self.extra)}")
        super().__init__("; ".join(parts) or "coverage mismatch")


class RetriesExhaustedError(AssessmentError):
    """Every attempt produced an invalid response; carries the last error."""

    def __init__(self, attempts: int, last_error: AssessmentError) -> None:
        super().__init__(f"no valid assessment after {attempts} attempt(s): {last_error}")
        self.attempts = attempts
        self.last_error = last_error


class FixtureKeyError(AssessmentError):
    """Requested scenario/condition pair is absent from the fixture store."""


class AssessorFailure(AssessmentError):
    """An assessor produced an error or an invalid assessment."""

    def __init__(self, assessor: str, cause: Exception | str) -> None:
        super().__init__(f'assessor "{assessor}": {cause}')
        self.assessor = assessor
        self.cause = cause


@dataclass(frozen=True)
class CostClearance:
    """Impact factor (>= 1, dimensionless) and falloff range (>= 0, meters)."""

    cost: float
    clearance: float


@dataclass(frozen=True)
class Provenance:
    assessor: str
    parameters: dict = field(default_factory=dict)
    attempts: int = 1
    transcript: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Assessment:
    """Validated map from object id to (cost, clearance), plus provenance."""

    entries: dict[str, CostClearance]
    provenance: Provenance


class AssessorPort(Protocol):
    """Contract every assessor implementation satisfies."""

    name: str

    def __call__(
        self,
        partial: SceneGraph,
        trajectory: Trajectory,
        relevant: Sequence[str],
        preferences: Sequence[str],
    ) -> Assessment: ...


def validate_assessment(assessment: Assessment, relevant: Iterable[str]) -> list[Violation]:
    """Range and coverage checks; empty list means the assessment is valid."""
    violations: list[Violation] = []
    for object_id, cc in assessment.entries.items():
        if not math.isfinite(cc.cost) or cc.cost < COST_FLOOR:
            violations.append(
                Violation("cost out of range", (object_id,), f"cost {cc.cost!r} must be >= 1")
            )
        if not math.isfinite(cc.clearance) or cc.clearance < CLEARANCE_FLOOR:
            violations.append(
                Violation(
                    "clearance out of range",
                    (object_id,),
                    f"clearance {cc.clearance!r} must be >= 0",
                )
            )
    wanted = set(relevant)
    missing = wanted - set(assessment.entries)
    extra = set(assessment.entries) - wanted
    if missing:
        violations.append(
            Violation("missing ids", tuple(sorted(missing)), f"no entry for {sorted(missing)}")
        )
    if extra:
        violations.append(
            Violation("extra ids", tuple(sorted(extra)), f"unrequested entry for {sorted(extra)}")
        )
    return violations


def assess(
    port: AssessorPort,
    partial: SceneGraph,
    trajectory: Trajectory,
    relevant: Sequence[str],
    preferences: Sequence[str],
) -> Assessment:
    """Run an assessor and enforce the port contract on its output."""
    unknown = [i for i in relevant if i not in partial]
    if unknown:
        raise ValueError(f"relevant ids not in the partial graph: {unknown}")
    name = getattr(port, "name", type(port).__name__)
    try:
        assessment = port(partial, trajectory, relevant, preferences)
    except AssessmentError as exc:
        raise AssessorFailure(name, exc) from exc
    violations = validate_assessment(assessment, relevant)
    if violations:
        details = "; ".join(v.message for v in violations)
        raise AssessorFailure(name, f"invalid assessment: {details}")
    return assessment


# --- prompt and response contract -------------------------------------------

PROMPT_HEADER = """\
You assign navigation impact values to objects near a planned robot
trajectory in a domestic scene. The scene is given as object descriptions
with bounding boxes (meters), affordances, attributes, and relations between
objects, followed by the trajectory waypoints and the user's preferences.

For every object listed under OBJECTS, return:
- "cost": a number greater than or equal to 1. It is the object's impact
  factor on the trajectory; use 1 for objects the robot may treat as
  ordinary free space.
- "clearance": a number greater than or equal to 0, in meters. The object's
  influence fades with distance and vanishes beyond this range; use 0 for
  objects with no influence past their own footprint.

Respond with JSON only, exactly this shape:
{"assessments": [{"object_id": "<id>", "cost": <number>, "clearance": <number>}]}
Include every listed object id exactly once and no others.
"""


def build_prompt(
    partial: SceneGraph, trajectory: Trajectory, preferences: Sequence[str]
) -> str:
    """Deterministic prompt: fixed instruction header + canonical context text."""
    return PROMPT_HEADER + "\n" + render_context_text(partial, trajectory, preferences)


def parse_assessment(response: str, relevant: Iterable[str]) -> Assessment:
    """Parse the strict response JSON and enforce ranges and exact coverage.

    Raises ResponseFormatError, ValueOutOfRangeError, or CoverageError; each
    is distinct so retry policies can react to the specific failure.
    """
    try:
        data = json.loads(response)
    except json.JSONDecodeError as exc:
        raise ResponseFormatError(f"response is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or set(data) != {"assessments"}:
        raise ResponseFormatError('response must be an object with the single key "assessments"')
    items = data["assessments"]
    if not isinstance(items, list):
        raise ResponseFormatError('"assessments" must be a list')
    entries: dict[str, CostClearance] = {}
    for i, item in enumerate(items):
        if not isinstance(item, dict) or set(item) != {"object_id", "cost", "clearance"}:
            raise ResponseFormatError(
                f"assessments[{i}] must have exactly the keys object_id, cost, clearance"
            )
        object_id = item["object_id"]
        if not isinstance(object_id, str) or not object_id:
            raise ResponseFormatError(f"assessments[{i}].object_id must be a non-empty string")
        if object_id in entries:
            raise ResponseFormatError(f'duplicate object_id "{object_id}"')
        values = {}
        for field_name, floor in (("cost", COST_FLOOR), ("clearance", CLEARANCE_FLOOR)):
            value = item[field_name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ResponseFormatError(f"assessments[{i}].{field_name} must be a number")
            value = float(value)
            if not math.isfinite(value) or value < floor:
                raise ValueOutOfRangeError(object_id, field_name, value)
            values[field_name] = value
        entries[object_id] = CostClearance(values["cost"], values["clearance"])
    wanted = set(relevant)
    if set(entries) != wanted:
        raise CoverageError(missing=wanted - set(entries), extra=set(entries) - wanted)
    return Assessment(entries=entries, provenance=Provenance(assessor="parse"))


# --- LLM assessor ------------------------------------------------------------

LLM_URL_ENV = "SOCIOPLAN_LLM_URL"
LLM_KEY_ENV = "SOCIOPLAN_LLM_KEY"

Transport = Callable[[list[dict]], str]


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3


@dataclass
class HttpChatTransport:
    """OpenAI-compatible chat-completion transport.

    Endpoint and credential default to the SOCIOPLAN_LLM_URL and
    SOCIOPLAN_LLM_KEY environment variables. Each call builds its own
    request state, so concurrent independent requests are safe.
    """

    model: str
    url: str | None = None
    api_key: str | None = None
    timeout_s: float = 60.0

    def __call__(self, messages: list[dict]) -> str:
        url = self.url or os.environ.get(LLM_URL_ENV)
        if not url:
            raise TransportError(f"no LLM endpoint configured; set {LLM_URL_ENV}")
        key = self.api_key or os.environ.get(LLM_KEY_ENV)
        headers = {"Content-Type": "application/json"}
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            response = requests.post(
                url,
                json={"model": self.model, "messages": list(messages)},
                headers=headers,
                timeout=self.timeout_s,
            )
            response.raise_for_status()
            body = response.json()
            return body["choices"][0]["message"]["content"]
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransportError(f"malformed completion response: {exc!r}") from exc


def llm_assess(
    transport: Transport,
    partial: SceneGraph,
    trajectory: Trajectory,
    relevant: Sequence[str],
    preferences: Sequence[str],
    policy: RetryPolicy = RetryPolicy(),
) -> Assessment:
    """Query the LLM and validate its answer, re-querying on invalid responses.

    Each retry appends the validation error to the conversation so the model
    can repair its output. Transport failures are not retried. Raises
    RetriesExhaustedError (carrying the last parse error) when every attempt
    fails validation.
    """
    if policy.max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    prompt = build_prompt(partial, trajectory, preferences)
    messages: list[dict] = [{"role": "user", "content": prompt}]
    transcript: list[tuple[str, str]] = [("user", prompt)]
    last_error: AssessmentError | None = None
    for attempt in range(1, policy.max_attempts + 1):
        reply = transport(messages)
        if not isinstance(reply, str):
            raise TransportError(f"transport must return text, got {type(reply).__name__}")
        transcript.append(("assistant", reply))
        try:
            parsed = parse_assessment(reply, relevant)
        except (ResponseFormatError, ValueOutOfRangeError, CoverageError) as exc:
            last_error = exc
            feedback = (
                f"Your previous response was invalid: {exc}. "
                "Respond again with JSON only, in exactly the required shape, "
                "covering every listed object id exactly once."
            )
            messages.append({"role": "assistant", "content": reply})
            messages.append({"role": "user", "content": feedback})
            transcript.append(("user", feedback))
            continue
        provenance = Provenance(
            assessor="llm",
            parameters={
                "model": getattr(transport, "model", None),
                "max_attempts": policy.max_attempts,
            },
            attempts=attempt,
            transcript=tuple(transcript),
        )
        return replace(parsed, provenance=provenance)
    assert last_error is not None
    raise RetriesExhaustedError(policy.max_attempts, last_error)


# --- rule-based assessor ------------------------------------------------------

HUMAN_PRESENT = CostClearance(5.0, 2.0)
HUMAN_UNEXPLAINED = CostClearance(10.0, 2.0)
SITTABLE_UNEXPLAINED = CostClearance(3.0, 1.0)
LARGE_BED_UNEXPLAINED = CostClearance(2.0, 0.5)
SPATIAL_TARGET = CostClearance(3.0, 1.5)
ACTIVITY_TARGET = CostClearance(2.0, 1.0)
NO_IMPACT = CostClearance(1.0, 0.0)

SITTABLE_TAGS = frozenset({"bed", "armchair", "chair", "sofa"})
SIT_AFFORDANCE = "sit"
LARGE_FOOTPRINT_AREA_M2 = 1.5
SEATED_VERB_FRAGMENT = "sit"
PREFERENCE_KEYWORDS = ("don't disturb", "watching")
PREFERENCE_FACTOR = 1.0


def _sittable(graph: SceneGraph, object_id: str) -> bool:
    node = graph.node(object_id)
    return SIT_AFFORDANCE in node.affordances or node.tag in SITTABLE_TAGS


def rule_based_assess(
    partial: SceneGraph,
    trajectory: Trajectory,
    relevant: Sequence[str],
    preferences: Sequence[str],
) -> Assessment:
    """Deterministic stand-in assessor.

    Encodes how an engaged human reshapes object impact: a human whose
    placement is unexplained by relations dominates everything sittable,
    while an explained (seated, occupied) human concentrates impact on the
    objects they actually use and releases the rest.

    Rules apply in order, later rules overriding earlier ones:
      1. every object starts at no impact;
      2. human nodes carry elevated impact;
      3. if humans are present but carry no relations, they dominate (10, 2)
         and every sittable object is raised, large-footprint beds less so;
      4. targets of a human spatial relation get (3, 1.5); targets of a human
         activity relation get (2, 1);
      5. while some human is seated, sittable objects unrelated to any human
         are released back to no impact;
      6. preference keywords rescale human cost, never below its rule value.
    """
    entries = {object_id: NO_IMPACT for object_id in relevant}  # rule 1

    human_ids = [i for i in partial.human_ids()]
    human_relations = [r for r in partial.relations if r.head_id in set(human_ids)]

    for human_id in human_ids:  # rule 2
        if human_id in entries:
            entries[human_id] = HUMAN_PRESENT

    if human_ids and not human_relations:  # rule 3
        for human_id in human_ids:
            if human_id in entries:
                entries[human_id] = HUMAN_UNEXPLAINED
        for object_id in relevant:
            node = partial.node(object_id)
            if node.is_human or not _sittable(partial, object_id):
                continue
            entries[object_id] = SITTABLE_UNEXPLAINED
            footprint_area = node.bbox_extent[0] * node.bbox_extent[1]
            if node.tag == "bed" and footprint_area >= LARGE_FOOTPRINT_AREA_M2:
                entries[object_id] = LARGE_BED_UNEXPLAINED

    for rel in human_relations:  # rule 4
        if rel.tail_id not in entries:
            continue
        if rel.kind is RelationKind.SPATIAL:
            entries[rel.tail_id] = SPATIAL_TARGET
        elif rel.kind is RelationKind.ACTIVITY:
            entries[rel.tail_id] = ACTIVITY_TARGET

    seated = any(
        r.kind is RelationKind.SPATIAL and SEATED_VERB_FRAGMENT in r.name.lower()
        for r in human_relations
    )
    if seated:  # rule 5
        related_to_human = {r.tail_id for r in human_relations}
        for object_id in relevant:
            node = partial.node(object_id)
            if node.is_human or object_id in related_to_human:
                continue
            if _sittable(partial, object_id):
                entries[object_id] = NO_IMPACT

    preference_text = " ".join(preferences).lower()
    if any(keyword in preference_text for keyword in PREFERENCE_KEYWORDS):  # rule 6
        for human_id in human_ids:
            if human_id in entries:
                current = entries[human_id]
                # Preferences keep the human dominant: scale but never lower.
                cost = max(current.cost * PREFERENCE_FACTOR, current.cost)
                entries[human_id] = CostClearance(cost, current.clearance)

    return Assessment(entries=entries, provenance=Provenance(assessor="rules"))


# --- replay assessor ----------------------------------------------------------


@dataclass(frozen=True)
class AssessmentStore:
    """Recorded assessments keyed by "scenario/condition"."""

    entries: dict[str, dict[str, CostClearance]]

    def key(self, scenario_key: str, condition: Condition) -> str:
        return f"{scenario_key}/{condition.value}"


def load_assessment_fixtures(document: bytes | str, *, strict: bool = False) -> AssessmentStore:
    data = parse_document(document, what="assessment fixture file")
    check_keys(
        data, required=("assessments",), optional=("schema_version",), path="$", strict=strict
    )
    require_version(data, "$", FIXTURE_SCHEMA_VERSION)
    if not isinstance(data["assessments"], dict):
        raise FormatError("expected an object keyed by scenario/condition", "assessments")
    store: dict[str, dict[str, CostClearance]] = {}
    for key, raw_entries in data["assessments"].items():
        path = f"assessments[{key!r}]"
        if not isinstance(raw_entries, dict):
            raise FormatError("expected an object keyed by object id", path)
        entries = {}
        for object_id, raw in raw_entries.items():
            entry_path = f"{path}[{object_id!r}]"
            check_keys(
                raw, required=("cost", "clearance"), optional=(), path=entry_path, strict=strict
            )
            cost = raw["cost"]
            clearance = raw["clearance"]
            for field_name, value in (("cost", cost), ("clearance", clearance)):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise FormatError(f"{field_name} must be a number", entry_path)
            entries[object_id] = CostClearance(float(cost), float(clearance))
        store[key] = entries
    return AssessmentStore(entries=store)


def fixtures_to_dict(store: AssessmentStore) -> dict:
    return {
        "schema_version": FIXTURE_SCHEMA_VERSION,
        "assessments": {
            key: {
                object_id: {"cost": cc.cost, "clearance": cc.clearance}
                for object_id, cc in entries.items()
            }
            for key, entries in store.entries.items()
        },
    }


def serialize_fixtures(store: AssessmentStore) -> str:
    return canonical_json(fixtures_to_dict(store))


def replay_assess(
    store: AssessmentStore, scenario_key: str, condition: Condition
) -> Assessment:
    """Return the recorded assessment for a scenario/condition pair, unchanged."""
    key = store.key(scenario_key, condition)
    if key not in store.entries:
        raise FixtureKeyError(f'no recorded assessment for "{key}"')
    return Assessment(
        entries=dict(store.entries[key]),
        provenance=Provenance(
            assessor="replay",
            parameters={"scenario_key": scenario_key, "condition": condition.value},
        ),
    )


# --- port adapters ------------------------------------------------------------


class RuleAssessor:
    name = "rules"

    def __call__(self, partial, trajectory, relevant, preferences) -> Assessment:
        return rule_based_assess(partial, trajectory, relevant, preferences)


@dataclass
class ReplayAssessor:
    store: AssessmentStore
    scenario_key: str
    condition: Condition
    name = "replay"

    def __call__(self, partial, trajectory, relevant, preferences) -> Assessment:
        return replay_assess(self.store, self.scenario_key, self.condition)


@dataclass
class LlmAssessor:
    transport: Transport
    policy: RetryPolicy = RetryPolicy()
    name = "llm"

    def __call__(self, partial, trajectory, relevant, preferences) -> Assessment:
        return llm_assess(self.transport, partial, trajectory, relevant, preferences, self.policy)
