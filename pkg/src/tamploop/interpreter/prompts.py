"""Prompt assembly from the shipped templates.

Templates live under assets/prompts with "{slot}" placeholders; optional
blocks (ICL examples, chain-of-thought steps, failure history) are composite
slots that collapse to the empty string when disabled.
"""
from __future__ import annotations

from functools import lru_cache

from .. import asset_path
from ..geometry.feedback import ALL_PARTS, PlanningFeedback
from ..pddl.render import render_action_definitions, render_predicate_definitions
from .data import DomainKnowledge, GenConfig, IclExample, Instruction, SceneObservation

PROBLEM_ASSUMPTIONS = (
    "When generating the problem specification, you must follow the "
    "following assumptions:\n"
    "1) For this task, you are allowed to add and use both robots in the "
    "initial state. You can use both a bot and b bot.\n"
    "2) We assume that a location is occupied and is not free if there is "
    "at least one object at the location."
)

PLAN_ASSUMPTIONS = (
    "When generating the plan of actions, you must follow the following "
    "assumptions:\n"
    "1) For this task, you are allowed to add and use both robots in the "
    "initial state. You can use both a bot and b bot.\n"
    "2) We assume that a location is occupied and is not free if there is "
    "at least one object at the location."
)

COT_INIT = ("Let's think step by step.\n"
            "1) First, write a short summary of this Cooking domain in words.\n"
            "2) Now, write the initial state for the given objects and locations.\n")

COT_GOAL = ("Let's think step by step.\n"
            "1) First, write a short summary of this Cooking domain in words.\n"
            "2) Now, write the goal conditions for the given instruction and objects.\n")

COT_PLAN = ("Let's think step by step.\n"
            "1) First, write a short summary of this Cooking domain in words.\n"
            "2) Now, generate a plan of actions that accomplishes the task "
            "specified by the instruction.\n")

COT_REVISE_PROBLEM = ("Let's think step by step.\n"
                      "1) Identify the cause of failure based on the failure feedback.\n"
                      "2) Generate a revised specification based on the cause of failure.")

COT_REVISE_PLAN = ("Let's think step by step.\n"
                   "1) Identify the cause of failure based on the failure feedback.\n"
                   "2) Now, generate a revised sequence of actions based on the feedback.")

TEMPLATE_NAMES = ("object_detection", "initial_state", "goal_state",
                  "corrective_problem", "baseline_plan", "baseline_corrective",
                  "single_arm_assumptions")


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    if name not in TEMPLATE_NAMES:
        raise KeyError(f"unknown prompt template {name!r}")
    return asset_path("prompts", f"{name}.txt").read_text(encoding="utf-8")


def fill(template: str, slots: dict[str, str]) -> str:
    out = template
    for key, value in slots.items():
        out = out.replace("{" + key + "}", value)
    if "{" in out and "}" in out:
        import re

        leftover = re.findall(r"\{[a-z_]+\}", out)
        if leftover:
            raise ValueError(f"unfilled prompt slots: {sorted(set(leftover))}")
    return out


def _assumptions(instruction: Instruction | None, default: str) -> str:
    if instruction is not None and instruction.arm_restriction == "single":
        return load_template("single_arm_assumptions").rstrip("\n")
    return default


def format_objects(objects: list[str] | tuple[str, ...]) -> str:
    return ", ".join(objects)


def format_bounding_boxes(observation: SceneObservation) -> str:
    return ", ".join(d.render() for d in observation.detections)


def format_objects_of_interest(knowledge: DomainKnowledge) -> str:
    return "\n".join(desc for _, desc in knowledge.characteristics)


def object_detection_prompt(knowledge: DomainKnowledge) -> str:
    return fill(load_template("object_detection"),
                {"objects_of_interest": format_objects_of_interest(knowledge)})


def _init_icl_block(example: IclExample | None) -> str:
    if example is None:
        return ""
    return ("### Example 1 (start)\n"
            f"The objects: {example.objects}\n"
            f"The bounding boxes: {example.bounding_boxes}\n"
            f"The corresponding initial state: {example.initial_state}\n"
            "### Example 1 (end)\n\n")


def _goal_icl_block(example: IclExample | None) -> str:
    if example is None:
        return ""
    return ("### Example 1 (start)\n"
            f"The objects: {example.objects}\n"
            f"The initial state: {example.initial_state}\n"
            f"The linguistic instruction: {example.instruction}\n"
            f"The corresponding goal conditions: {example.goal_state}\n"
            "### Example 1 (end)\n\n")


def initial_state_prompt(knowledge: DomainKnowledge, objects: list[str],
                         observation: SceneObservation, config: GenConfig,
                         instruction: Instruction | None = None,
                         icl_example: IclExample | None = None) -> str:
    return fill(load_template("initial_state"), {
        "predicates": render_predicate_definitions(knowledge.domain),
        "icl_examples": _init_icl_block(icl_example),
        "objects": format_objects(objects),
        "bounding_boxes": format_bounding_boxes(observation),
        "assumptions": _assumptions(instruction, PROBLEM_ASSUMPTIONS),
        "cot_steps": COT_INIT if config.use_cot else "",
    })


def goal_state_prompt(knowledge: DomainKnowledge, objects: list[str],
                      initial_state: str, instruction: Instruction,
                      config: GenConfig,
                      icl_example: IclExample | None = None) -> str:
    return fill(load_template("goal_state"), {
        "predicates": render_predicate_definitions(knowledge.domain),
        "icl_examples": _goal_icl_block(icl_example),
        "objects": format_objects(objects),
        "initial_state": initial_state,
        "linguistic_instruction": instruction.text,
        "assumptions": _assumptions(instruction, PROBLEM_ASSUMPTIONS),
        "cot_steps": COT_GOAL if config.use_cot else "",
    })


def _failure_blocks(intro: str, pairs: list[tuple[str, PlanningFeedback]],
                    parts: tuple[str, ...]) -> str:
    blocks = []
    for text, feedback in pairs:
        blocks.append(f"{intro}\n{text}\n"
                      "However, planning failed and returned the following "
                      f"feedback:\n{feedback.render_text(parts)}\n\n")
    return "".join(blocks)


def corrective_problem_prompt(knowledge: DomainKnowledge,
                              instruction: Instruction,
                              pairs: list[tuple[str, PlanningFeedback]],
                              config: GenConfig,
                              feedback_parts: tuple[str, ...] = ALL_PARTS) -> str:
    """The revision prompt; the problem/feedback block repeats once per pair
    (history first, the failing problem last)."""
    return fill(load_template("corrective_problem"), {
        "predicates": render_predicate_definitions(knowledge.domain),
        "actions": render_action_definitions(knowledge.domain),
        "linguistic_instruction": instruction.text,
        "failure_blocks": _failure_blocks(
            "You created the following problem specification:", pairs,
            feedback_parts),
        "assumptions": _assumptions(instruction, PROBLEM_ASSUMPTIONS),
        "cot_steps": COT_REVISE_PROBLEM if config.use_cot else "",
    })


def baseline_plan_prompt(knowledge: DomainKnowledge, instruction: Instruction,
                         objects: list[str], observation: SceneObservation,
                         config: GenConfig) -> str:
    return fill(load_template("baseline_plan"), {
        "linguistic_instruction": instruction.text,
        "objects": format_objects(objects),
        "bounding_boxes": format_bounding_boxes(observation),
        "actions": render_action_definitions(knowledge.domain),
        "predicates": render_predicate_definitions(knowledge.domain),
        "assumptions": _assumptions(instruction, PLAN_ASSUMPTIONS),
        "cot_steps": COT_PLAN if config.use_cot else "",
    })


def baseline_corrective_prompt(knowledge: DomainKnowledge,
                               instruction: Instruction, objects: list[str],
                               observation: SceneObservation,
                               pairs: list[tuple[str, PlanningFeedback]],
                               config: GenConfig,
                               feedback_parts: tuple[str, ...] = ALL_PARTS) -> str:
    return fill(load_template("baseline_corrective"), {
        "linguistic_instruction": instruction.text,
        "objects": format_objects(objects),
        "bounding_boxes": format_bounding_boxes(observation),
        "actions": render_action_definitions(knowledge.domain),
        "predicates": render_predicate_definitions(knowledge.domain),
        "failure_blocks": _failure_blocks(
            "You generated the following actions:", pairs, feedback_parts),
        "assumptions": _assumptions(instruction, PLAN_ASSUMPTIONS),
        "cot_steps": COT_REVISE_PLAN if config.use_cot else "",
    })
