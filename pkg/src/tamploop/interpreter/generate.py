"""Problem generation: the three estimators, corrective revision, and the
plan-generating baseline."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..geometry.feedback import ALL_PARTS, PlanningFeedback
from ..pddl.model import Atom, Literal, Problem, canon
from ..pddl.parser import PddlParseError, parse_problem
from .chat import ChatModel, ChatRequest, ChatResponse
from .data import (
    Detection,
    DomainKnowledge,
    GenConfig,
    IclExample,
    Instruction,
    SceneObservation,
)
from .extract import (
    ExtractionError,
    detection_identifiers,
    parse_detections,
    parse_goal_block,
    parse_init_block,
    parse_objects_block,
    parse_plan_strings,
)
from . import prompts


class GenerationError(ValueError):
    """A generation stage failed; carries the raw response for logging."""

    def __init__(self, stage: str, message: str, raw_text: str = "",
                 problem_text: str | None = None):
        self.stage = stage
        self.raw_text = raw_text
        self.problem_text = problem_text
        super().__init__(f"{stage}: {message}")


@dataclass
class GeneratedSpec:
    """Raw estimator outputs plus the assembled problem text."""

    objects: list[str]
    detections: list[Detection]
    init_atoms: list[Atom]
    goal_literals: list[Literal]
    problem_text: str
    transcripts: list[tuple[str, str]] = field(default_factory=list)  # (stage, digest)


def _ask(model: ChatModel, prompt: str, config: GenConfig,
         transcripts: list[tuple[str, str]], stage: str) -> ChatResponse:
    request = ChatRequest.user(prompt, temperature=config.temperature)
    transcripts.append((stage, request.digest()))
    return model.complete(request)


def estimate_objects(observation: SceneObservation, knowledge: DomainKnowledge,
                     model: ChatModel, config: GenConfig = GenConfig(),
                     transcripts: list | None = None
                     ) -> tuple[list[str], list[Detection]]:
    """Detect task-dependent objects and append the known fixed objects."""
    transcripts = transcripts if transcripts is not None else []
    prompt = prompts.object_detection_prompt(knowledge)
    response = _ask(model, prompt, config, transcripts, "object-estimation")
    try:
        detections = parse_detections(response.text)
    except ExtractionError as err:
        raise GenerationError("object-estimation", str(err), response.text)
    objects = detection_identifiers(detections, observation.fixed_objects)
    return objects, detections


def estimate_init(observation: SceneObservation, knowledge: DomainKnowledge,
                  objects: list[str], model: ChatModel,
                  config: GenConfig = GenConfig(),
                  instruction: Instruction | None = None,
                  icl_example: IclExample | None = None,
                  transcripts: list | None = None) -> tuple[list[Atom], str]:
    """Estimate the closed-world initial state; returns (atoms, raw text)."""
    if not objects:
        raise GenerationError("init-estimation", "no objects to describe")
    transcripts = transcripts if transcripts is not None else []
    prompt = prompts.initial_state_prompt(knowledge, objects, observation,
                                          config, instruction, icl_example)
    response = _ask(model, prompt, config, transcripts, "init-estimation")
    try:
        atoms = parse_init_block(response.text)
    except ExtractionError as err:
        raise GenerationError("init-estimation", str(err), response.text)
    return atoms, response.text


def estimate_goal(instruction: Instruction, knowledge: DomainKnowledge,
                  objects: list[str], init_atoms: list[Atom],
                  model: ChatModel, config: GenConfig = GenConfig(),
                  icl_example: IclExample | None = None,
                  transcripts: list | None = None) -> list[Literal]:
    """Estimate the goal conjunction from the instruction."""
    transcripts = transcripts if transcripts is not None else []
    init_text = "(:init " + " ".join(sorted(a.render() for a in init_atoms)) + ")"
    prompt = prompts.goal_state_prompt(knowledge, objects, init_text,
                                       instruction, config, icl_example)
    response = _ask(model, prompt, config, transcripts, "goal-estimation")
    try:
        return parse_goal_block(response.text)
    except ExtractionError as err:
        raise GenerationError("goal-estimation", str(err), response.text)


def assemble_problem_text(name: str, objects: list[str], init_atoms: list[Atom],
                          goal_literals: list[Literal],
                          domain_name: str = "cooking") -> str:
    lines = [f"(define (problem {name})", f"    (:domain {domain_name})",
             f"    (:objects {' '.join(objects)})"]
    if init_atoms:
        lines.append("    (:init")
        lines.extend(f"        {a.render()}" for a in
                     sorted(init_atoms, key=lambda a: a.render()))
        lines.append("    )")
    else:
        lines.append("    (:init)")
    if goal_literals:
        lines.append("    (:goal (and")
        lines.extend(f"        {l.render()}" for l in
                     sorted(goal_literals, key=lambda l: l.render()))
        lines.append("    ))")
    else:
        lines.append("    (:goal (and))")
    lines.append(")")
    return "\n".join(lines) + "\n"


def generate_spec(instruction: Instruction, observation: SceneObservation,
                  knowledge: DomainKnowledge, model: ChatModel,
                  config: GenConfig = GenConfig(),
                  init_icl: IclExample | None = None,
                  goal_icl: IclExample | None = None,
                  name: str = "generated") -> GeneratedSpec:
    """Run the three estimators in order and assemble the problem text.

    Structural extraction failures raise GenerationError tagged with the
    failing stage; semantic validity is the syntax checker's concern.
    """
    transcripts: list[tuple[str, str]] = []
    objects, detections = estimate_objects(observation, knowledge, model,
                                           config, transcripts)
    init_atoms, _ = estimate_init(observation, knowledge, objects, model,
                                  config, instruction, init_icl, transcripts)
    goal = estimate_goal(instruction, knowledge, objects, init_atoms, model,
                         config, goal_icl, transcripts)
    text = assemble_problem_text(name, objects, init_atoms, goal)
    return GeneratedSpec(objects, detections, init_atoms, goal, text,
                         transcripts)


def generate_problem(instruction: Instruction, observation: SceneObservation,
                     knowledge: DomainKnowledge, model: ChatModel,
                     config: GenConfig = GenConfig(),
                     name: str = "generated") -> Problem:
    """Estimators composed into a validated Problem."""
    spec = generate_spec(instruction, observation, knowledge, model, config,
                         name=name)
    try:
        return parse_problem(spec.problem_text, knowledge.domain)
    except PddlParseError as err:
        raise GenerationError("assembly", err.message,
                              problem_text=spec.problem_text)


@dataclass
class RevisionResult:
    objects: list[str]
    init_atoms: list[Atom]
    goal_literals: list[Literal]
    problem_text: str
    transcripts: list[tuple[str, str]] = field(default_factory=list)


def revise_problem(previous_text: str, feedback: PlanningFeedback,
                   history_pairs: list[tuple[str, PlanningFeedback]],
                   instruction: Instruction, knowledge: DomainKnowledge,
                   model: ChatModel, config: GenConfig = GenConfig(),
                   feedback_parts: tuple[str, ...] = ALL_PARTS,
                   name: str = "generated") -> RevisionResult:
    """One corrective-revision round.

    The prompt repeats the problem/feedback block for every history pair and
    then the failing problem; the response must contain objects, init and
    goal blocks. An unparseable response raises GenerationError whose
    raw_text lets the caller treat it as a spent revision attempt.
    """
    if feedback is None:
        raise ValueError("revision requires nonempty feedback")
    pairs = list(history_pairs) + [(previous_text, feedback)]
    transcripts: list[tuple[str, str]] = []
    prompt = prompts.corrective_problem_prompt(knowledge, instruction, pairs,
                                               config, feedback_parts)
    response = _ask(model, prompt, config, transcripts, "revision")
    try:
        objects = parse_objects_block(response.text)
        init_atoms = parse_init_block(response.text)
        goal = parse_goal_block(response.text)
    except ExtractionError as err:
        raise GenerationError("revision", str(err), response.text)
    text = assemble_problem_text(name, objects, init_atoms, goal)
    return RevisionResult(objects, init_atoms, goal, text, transcripts)


class BaselinePlanError(ValueError):
    def __init__(self, message: str, raw_text: str = ""):
        self.raw_text = raw_text
        super().__init__(message)


def _validate_plan_steps(steps: list[tuple[str, tuple[str, ...]]],
                         knowledge: DomainKnowledge,
                         raw: str) -> list[str]:
    out = []
    for name, args in steps:
        schema = knowledge.domain.action(name)
        if schema is None:
            raise BaselinePlanError(f"unknown action name {name!r}", raw)
        if len(args) != len(schema.parameters):
            raise BaselinePlanError(
                f"action {schema.name}/{len(schema.parameters)} expects "
                f"{len(schema.parameters)} argument(s), got {len(args)}", raw)
        out.append(f"{schema.name}({', '.join(args)})")
    return out


def baseline_generate_plan(instruction: Instruction,
                           observation: SceneObservation,
                           knowledge: DomainKnowledge, objects: list[str],
                           model: ChatModel, config: GenConfig = GenConfig(),
                           transcripts: list | None = None) -> list[str]:
    """VLM-as-planner baseline: ask for the action sequence directly."""
    transcripts = transcripts if transcripts is not None else []
    prompt = prompts.baseline_plan_prompt(knowledge, instruction, objects,
                                          observation, config)
    response = _ask(model, prompt, config, transcripts, "baseline-plan")
    try:
        steps = parse_plan_strings(response.text)
    except ExtractionError as err:
        raise BaselinePlanError(str(err), response.text)
    return _validate_plan_steps(steps, knowledge, response.text)


def baseline_revise_plan(previous_plan: list[str], feedback: PlanningFeedback,
                         history_pairs: list[tuple[str, PlanningFeedback]],
                         instruction: Instruction,
                         observation: SceneObservation,
                         knowledge: DomainKnowledge, objects: list[str],
                         model: ChatModel, config: GenConfig = GenConfig(),
                         feedback_parts: tuple[str, ...] = ALL_PARTS,
                         transcripts: list | None = None) -> list[str]:
    """Corrective revision over baseline plans."""
    if feedback is None:
        raise ValueError("revision requires nonempty feedback")
    transcripts = transcripts if transcripts is not None else []
    plan_text = "[" + ", ".join(f'"{s}"' for s in previous_plan) + "]"
    pairs = list(history_pairs) + [(plan_text, feedback)]
    prompt = prompts.baseline_corrective_prompt(knowledge, instruction,
                                                objects, observation, pairs,
                                                config, feedback_parts)
    response = _ask(model, prompt, config, transcripts, "baseline-revision")
    try:
        steps = parse_plan_strings(response.text)
    except ExtractionError as err:
        raise BaselinePlanError(str(err), response.text)
    return _validate_plan_steps(steps, knowledge, response.text)
