"""Canonical sample slot values for the prompt golden-file tests."""
from tamploop import load_cooking_domain
from tamploop.geometry.feedback import PlanningFeedback
from tamploop.interpreter import (
    Detection,
    DomainKnowledge,
    GenConfig,
    IclExample,
    Instruction,
    SceneObservation,
)
from tamploop.interpreter import prompts


def sample_inputs():
    domain = load_cooking_domain()
    knowledge = DomainKnowledge(domain, (
        ("cucumber", "cucumber is a long green cucumber"),
        ("knife", "knife is a kitchen knife with a black handle"),
    ))
    observation = SceneObservation(
        detections=(Detection("cucumber", (100, 200, 180, 260)),
                    Detection("knife", (420, 310, 470, 360))),
        fixed_objects=("a_bot", "b_bot", "tray", "cutting_board", "knife_holder"))
    instruction = Instruction("Move the cucumber to the cutting board.")
    single_arm = Instruction("Move the cucumber to the cutting board.",
                             arm_restriction="single")
    objects = ["cucumber", "knife", "a_bot", "b_bot", "tray", "cutting_board",
               "knife_holder"]
    icl = IclExample(
        objects="carrot, a_bot, b_bot, tray, plate",
        bounding_boxes="carrot [210, 140, 260, 220]",
        initial_state="(:init (At carrot tray) (HandEmpty a_bot) "
                      "(HandEmpty b_bot) (Location plate) (Location tray) "
                      "(PhysicalObject carrot) (Robot a_bot) (Robot b_bot) "
                      "(isNotFree tray))",
        instruction="Move the carrot to the plate.",
        goal_state="(:goal (and (At carrot plate)))")
    feedback = PlanningFeedback(
        comments=("Stage 'move-to-pregrasp(knife)' of step 3 "
                  "(equip_tool(a_bot, knife, knife_holder, cucumber)) failed "
                  "for robot a_bot: arm-conflict after 32 sampling attempt(s).",),
        trace=(("move-to-pregrasp(cucumber) [a_bot]", "ok"),
               ("grasp(cucumber) [a_bot]", "ok"),
               ("move-to-pregrasp(knife) [a_bot]", "failed"),
               ("skill(cucumber) [a_bot]", "not-reached")),
        message="Motion planning failed while executing equip_tool(a_bot, "
                "knife, knife_holder, cucumber) (stage "
                "'move-to-pregrasp(knife)', robot a_bot): there is a "
                "collision between a_bot and b_bot: every sampled pose for "
                "a_bot intersects the arm of b_bot, which is in a fixture "
                "pose. Stages before 'move-to-pregrasp(knife)' planned "
                "successfully; later stages were not reached.",
        origin="motion-planner")
    previous_problem = ("(define (problem generated)\n"
                        "    (:domain cooking)\n"
                        "    (:objects cucumber a_bot b_bot tray cutting_board)\n"
                        "    (:init\n        (At cucumber tray)\n"
                        "        (HandEmpty a_bot)\n        (HandEmpty b_bot)\n"
                        "    )\n    (:goal (and\n"
                        "        (At cucumber cutting_board)\n    ))\n)")
    previous_plan = '["pick(a_bot, cucumber, tray)", "place(a_bot, cucumber, cutting_board)"]'
    return {
        "knowledge": knowledge, "observation": observation,
        "instruction": instruction, "single_arm": single_arm,
        "objects": objects, "icl": icl, "feedback": feedback,
        "previous_problem": previous_problem, "previous_plan": previous_plan,
    }


def render_all():
    s = sample_inputs()
    cfg = GenConfig(use_cot=True, icl_examples=1)
    pairs = [(s["previous_problem"], s["feedback"])]
    plan_pairs = [(s["previous_plan"], s["feedback"])]
    return {
        "object_detection": prompts.object_detection_prompt(s["knowledge"]),
        "initial_state": prompts.initial_state_prompt(
            s["knowledge"], s["objects"], s["observation"], cfg,
            s["instruction"], s["icl"]),
        "goal_state": prompts.goal_state_prompt(
            s["knowledge"], s["objects"],
            "(:init (At cucumber tray) (At knife knife_holder))",
            s["instruction"], cfg, s["icl"]),
        "corrective_problem": prompts.corrective_problem_prompt(
            s["knowledge"], s["instruction"], pairs, cfg),
        "baseline_plan": prompts.baseline_plan_prompt(
            s["knowledge"], s["instruction"], s["objects"], s["observation"],
            cfg),
        "baseline_corrective": prompts.baseline_corrective_prompt(
            s["knowledge"], s["instruction"], s["objects"], s["observation"],
            plan_pairs, cfg),
        "single_arm_initial_state": prompts.initial_state_prompt(
            s["knowledge"], s["objects"], s["observation"], cfg,
            s["single_arm"], s["icl"]),
    }
