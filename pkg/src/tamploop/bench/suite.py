"""The five cooking tasks: 48 seeded instances with gold annotations.

Scene coordinates are original: each task kind has a canonical tabletop
layout jittered per instance, constrained so every gold problem stays
solvable by the integrated planner (asserted at build time).
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .. import load_cooking_domain
from ..geometry import MotionConfig, SceneModel
from ..interpreter import (
    Detection,
    DomainKnowledge,
    IclExample,
    Instruction,
    SceneObservation,
)
from ..pddl import ground, parse_problem, render_problem
from ..pddl.model import Atom, Domain, Literal, Problem
from ..pddl.render import render_goal_block, render_init_block
from ..search import PlanSkeleton, SearchConfig, plan
from ..tamp import TampSolution, solve
from ..validate import validate_syntax

CHARACTERISTICS = {
    "cucumber": "cucumber is a long green cucumber",
    "carrot": "carrot is an orange carrot",
    "apple": "apple is a red apple",
    "knife": "knife is a kitchen knife with a black handle",
}
FOODS = ("cucumber", "carrot", "apple")
TASK_KINDS = ("pick-place", "pick-obstacles-dual", "pick-obstacles-single",
              "slice-food", "slice-serve")

BASE_LAYOUT = {
    "tray": ((0.0, 0.60), 0.13, False, False),
    "cutting_board": ((0.0, 0.30), 0.14, True, False),
    "plate": ((-0.22, 0.52), 0.11, False, False),
    "bowl": ((0.22, 0.52), 0.10, False, False),
    "knife_holder": ((0.30, 0.28), 0.06, False, True),
}
ROBOT_BASES = {"a_bot": (-0.55, 0.0), "b_bot": (0.55, 0.0)}
REACH = 1.0
CLEARANCE = 0.04


@dataclass(frozen=True)
class TaskInstance:
    instance_id: str
    kind: str
    instruction: Instruction
    scene: SceneModel
    observation: SceneObservation
    knowledge: DomainKnowledge
    gold_problem: Problem
    gold_plan: tuple[str, ...]
    gold_plan_length: int
    icl: IclExample


class SuiteError(RuntimeError):
    pass


def _display(identifier: str) -> str:
    return identifier.replace("_", " ")


def _jitter(rng: random.Random, point, magnitude=0.015):
    return (round(point[0] + rng.uniform(-magnitude, magnitude), 4),
            round(point[1] + rng.uniform(-magnitude, magnitude), 4))


def _scene(rng: random.Random, locations: list[str],
           placements: dict[str, str]) -> SceneModel:
    """Jittered layout restricted to the named locations; placements map
    object name -> location name (knife is a tool, foods are food)."""
    data = {"robots": {name: {"base": list(base), "reach": REACH,
                              "clearance": CLEARANCE}
                       for name, base in ROBOT_BASES.items()},
            "locations": {}, "objects": {}}
    centers = {}
    for name in locations:
        center, radius, workspace, holder = BASE_LAYOUT[name]
        centers[name] = _jitter(rng, center)
        data["locations"][name] = {"center": list(centers[name]),
                                   "radius": radius, "workspace": workspace,
                                   "tool_holder": holder}
    offsets = {}
    for obj, loc in sorted(placements.items()):
        shared = [o for o, l in sorted(placements.items()) if l == loc]
        shift = 0.0
        if len(shared) > 1:
            shift = -0.04 + 0.08 * shared.index(obj) / (len(shared) - 1)
        pos = (round(centers[loc][0] + shift, 4), centers[loc][1])
        kind = "tool" if obj == "knife" else "food"
        radius = 0.02 if obj == "knife" else 0.035
        data["objects"][obj] = {"position": list(pos), "radius": radius,
                                "kind": kind}
        offsets[obj] = pos
    return SceneModel.from_dict(data)


def _observation(scene: SceneModel, movable: list[str],
                 fixed: list[str]) -> SceneObservation:
    detections = []
    for name in movable:
        obj = scene.objects[name]
        px = int(round(640 + 400 * obj.position[0]))
        py = int(round(480 - 400 * obj.position[1]))
        half = max(12, int(round(obj.radius * 400)))
        detections.append(Detection(name, (px - half, py - half,
                                           px + half, py + half)))
    return SceneObservation(tuple(detections), tuple(fixed))


def _gold_problem(name: str, robots: list[str], foods: list[str],
                  locations: list[str], placements: dict[str, str],
                  goal: list[Literal], with_knife: bool) -> Problem:
    objects = list(robots) + list(foods)
    if with_knife:
        objects.append("knife")
    objects += list(locations)
    init = []
    for r in robots:
        init.append(Atom("Robot", (r,)))
        init.append(Atom("HandEmpty", (r,)))
    for f in foods:
        init.append(Atom("PhysicalObject", (f,)))
    if with_knife:
        init.append(Atom("Tool", ("knife",)))
    for l in locations:
        init.append(Atom("Location", (l,)))
    if "cutting_board" in locations:
        init.append(Atom("isWorkspace", ("cutting_board",)))
    if "knife_holder" in locations:
        init.append(Atom("ToolHolder", ("knife_holder",)))
    occupied = sorted({loc for loc in placements.values()})
    for obj, loc in sorted(placements.items()):
        init.append(Atom("At", (obj, loc)))
    for loc in occupied:
        init.append(Atom("isNotFree", (loc,)))
    return Problem(name, "cooking", tuple(objects), tuple(init), tuple(goal))


def _knowledge(domain: Domain, movable: list[str]) -> DomainKnowledge:
    chars = tuple((m, CHARACTERISTICS[m]) for m in movable)
    return DomainKnowledge(domain, chars)


def _build_instance(domain: Domain, kind: str, index: int,
                    rng: random.Random, check: bool = True) -> TaskInstance:
    instance_id = f"{kind}-{index:02d}"
    arm = "single" if kind == "pick-obstacles-single" else "both"
    robots = ["a_bot"] if arm == "single" else ["a_bot", "b_bot"]

    if kind in ("pick-place", "pick-obstacles-dual", "pick-obstacles-single"):
        food = rng.choice(FOODS)
        target = rng.choice(("plate", "cutting_board"))
        locations = ["tray", "plate", "cutting_board"]
        placements = {food: "tray"}
        foods = [food]
        goal = [Literal(Atom("At", (food, target)))]
        if kind != "pick-place":
            obstacle = rng.choice([f for f in FOODS if f != food])
            placements[obstacle] = target
            foods.append(obstacle)
            if kind == "pick-obstacles-dual":
                # the dual-arm task moves the collision object to the tray;
                # the single-arm variant leaves its parking spot free
                goal.append(Literal(Atom("At", (obstacle, "tray"))))
        instruction = f"Move the {food} to the {_display(target)}."
        with_knife = False
    elif kind == "slice-food":
        two_targets = index % 3 == 2  # 3 of the 10 instances
        chosen = rng.sample(FOODS, 2 if two_targets else 1)
        foods = list(chosen)
        locations = ["tray", "cutting_board", "knife_holder"]
        placements = {f: "tray" for f in foods}
        placements["knife"] = "knife_holder"
        goal = [Literal(Atom("isSliced", (f,))) for f in foods]
        if two_targets:
            instruction = f"Slice the {foods[0]} and the {foods[1]}."
        else:
            instruction = f"Slice the {foods[0]}."
        with_knife = True
    elif kind == "slice-serve":
        food = rng.choice(FOODS)
        foods = [food]
        locations = ["tray", "cutting_board", "bowl", "knife_holder"]
        placements = {food: "tray", "knife": "knife_holder"}
        goal = [Literal(Atom("isSliced", (food,))),
                Literal(Atom("Served", (food, "bowl")))]
        instruction = f"Slice the {food} and serve them in the bowl."
        with_knife = True
    else:
        raise SuiteError(f"unknown task kind {kind}")

    scene = _scene(rng, locations, placements)
    movable = sorted(placements)
    fixed = robots + locations
    observation = _observation(scene, movable, fixed)
    gold = _gold_problem(instance_id, robots, foods, locations, placements,
                         goal, with_knife)
    knowledge = _knowledge(domain, movable)

    report = validate_syntax("", render_problem(gold), domain=domain)
    if not report.ok:
        raise SuiteError(f"{instance_id}: gold problem invalid: "
                         f"{report.diagnostics}")
    task = ground(domain, gold)
    skeleton = plan(task, SearchConfig(strategy="bfs", heuristic="none"))
    if not isinstance(skeleton, PlanSkeleton):
        raise SuiteError(f"{instance_id}: gold problem has no plan")
    if check:
        outcome = solve(domain, gold, scene, SearchConfig(), MotionConfig(),
                        seed=index)
        if not isinstance(outcome, TampSolution):
            raise SuiteError(f"{instance_id}: gold problem is not "
                             f"TAMP-solvable: {outcome.feedback.message}")

    icl = IclExample(
        objects=", ".join(gold.objects),
        bounding_boxes=", ".join(d.render() for d in observation.detections),
        initial_state=render_init_block(gold),
        instruction=instruction,
        goal_state=render_goal_block(gold))
    return TaskInstance(instance_id, kind, Instruction(instruction, arm),
                        scene, observation, knowledge, gold,
                        tuple(skeleton.signatures()), skeleton.cost, icl)


def build_suite(seed: int = 0, check: bool = True,
                domain: Domain | None = None) -> list[TaskInstance]:
    """48 instances: 10 pick-place, 9 shared obstacle scenes instantiated for
    the dual- and single-arm variants, 10 slice-food, 10 slice-serve."""
    domain = domain or load_cooking_domain()
    instances: list[TaskInstance] = []
    for i in range(10):
        rng = random.Random((seed, "pick-place", i).__repr__())
        instances.append(_build_instance(domain, "pick-place", i, rng, check))
    for i in range(9):
        # the same scene rng drives both variants so the scenes match
        dual = _build_instance(domain, "pick-obstacles-dual", i,
                               random.Random((seed, "obstacles", i).__repr__()),
                               check)
        single = _build_instance(domain, "pick-obstacles-single", i,
                                 random.Random((seed, "obstacles", i).__repr__()),
                                 check)
        instances.extend([dual, single])
    for i in range(10):
        rng = random.Random((seed, "slice-food", i).__repr__())
        instances.append(_build_instance(domain, "slice-food", i, rng, check))
    for i in range(10):
        rng = random.Random((seed, "slice-serve", i).__repr__())
        instances.append(_build_instance(domain, "slice-serve", i, rng, check))
    return instances


def icl_pool_for(instance: TaskInstance,
                 instances: list[TaskInstance]) -> list[IclExample]:
    """Examples drawn from other instances of the same task kind."""
    return [other.icl for other in instances
            if other.kind == instance.kind
            and other.instance_id != instance.instance_id]


def write_suite(instances: list[TaskInstance], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    (out / "scenes").mkdir(parents=True, exist_ok=True)
    (out / "problems").mkdir(parents=True, exist_ok=True)
    entries = []
    for inst in instances:
        scene_file = f"scenes/{inst.instance_id}.json"
        problem_file = f"problems/{inst.instance_id}.pddl"
        inst.scene.save(out / scene_file)
        (out / problem_file).write_text(render_problem(inst.gold_problem),
                                        encoding="utf-8")
        entries.append({
            "id": inst.instance_id,
            "kind": inst.kind,
            "instruction": inst.instruction.text,
            "arm_restriction": inst.instruction.arm_restriction,
            "scene": scene_file,
            "gold_problem": problem_file,
            "gold_plan": list(inst.gold_plan),
            "gold_plan_length": inst.gold_plan_length,
            "observation": {
                "detections": [[d.label, list(d.bbox)]
                               for d in inst.observation.detections],
                "fixed_objects": list(inst.observation.fixed_objects),
            },
        })
    manifest = out / "manifest.json"
    manifest.write_text(json.dumps({"instances": entries}, indent=2,
                                   sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def load_suite(manifest_path: str | Path,
               domain: Domain | None = None) -> list[TaskInstance]:
    domain = domain or load_cooking_domain()
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    data = json.loads(manifest_path.read_text(encoding="utf-8"))
    instances = []
    for entry in data["instances"]:
        scene = SceneModel.load(base / entry["scene"])
        gold = parse_problem((base / entry["gold_problem"]).read_text(
            encoding="utf-8"), domain)
        observation = SceneObservation(
            tuple(Detection(label, tuple(bbox))
                  for label, bbox in entry["observation"]["detections"]),
            tuple(entry["observation"]["fixed_objects"]))
        movable = sorted(d.label for d in observation.detections)
        icl = IclExample(
            objects=", ".join(gold.objects),
            bounding_boxes=", ".join(d.render()
                                     for d in observation.detections),
            initial_state=render_init_block(gold),
            instruction=entry["instruction"],
            goal_state=render_goal_block(gold))
        instances.append(TaskInstance(
            entry["id"], entry["kind"],
            Instruction(entry["instruction"], entry["arm_restriction"]),
            scene, observation, _knowledge(domain, movable), gold,
            tuple(entry["gold_plan"]), entry["gold_plan_length"], icl))
    return instances
