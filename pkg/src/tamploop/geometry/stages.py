"""Mapping plan skeletons onto multi-step manipulation stage pipelines."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..pddl.model import canon
from ..search import PlanSkeleton
from .scene import SceneModel


@dataclass(frozen=True)
class MotionConfig:
    attempts: int = 32
    angle_count: int = 16
    approach_offsets: tuple[float, ...] = (0.06, 0.12)
    serve_count: int = 3
    position_tolerance: float = 0.01
    angle_tolerance: float = 0.05

    @property
    def grid_size(self) -> int:
        return self.angle_count * len(self.approach_offsets)


@dataclass(frozen=True)
class Stage:
    kind: str  # move-to-pregrasp | grasp | transfer | place-release | fixture-hold | skill | retreat
    robot: str
    target_object: str | None = None
    target_location: str | None = None
    skill: str | None = None
    source_step: int = 0
    source_action: str = ""
    pose_constraint: tuple[float, float, float] | None = None
    releases_hold: bool = False
    allow_occupied: bool = False
    required_tool: str | None = None

    @property
    def name(self) -> str:
        target = self.target_object or self.target_location or self.skill or ""
        return f"{self.kind}({target})"

    @property
    def samples_pose(self) -> bool:
        return self.kind in ("move-to-pregrasp", "transfer", "fixture-hold")


@dataclass(frozen=True)
class StagePipeline:
    stages: tuple[Stage, ...]

    def groups(self) -> dict[int, list[int]]:
        by_step: dict[int, list[int]] = {}
        for i, s in enumerate(self.stages):
            by_step.setdefault(s.source_step, []).append(i)
        return by_step


class StageCompileError(ValueError):
    pass


def compile_stages(skeleton: PlanSkeleton, scene: SceneModel,
                   config: MotionConfig = MotionConfig()) -> StagePipeline:
    """Compile each symbolic action into its contiguous stage group.

    pick -> pregrasp/grasp/retreat; place -> transfer/release; the tool
    actions mirror pick/place against the tool holder; fixture opens a hold
    that persists until the matching clean_up; slice becomes a single pinned
    skill stage; serve_food repeats grasp/transfer/release triples.
    """
    stages: list[Stage] = []
    for step, action in enumerate(skeleton.steps):
        name = canon(action.name)
        sig = action.signature
        if action.args and action.args[0] not in scene.robots:
            raise StageCompileError(f"unknown robot {action.args[0]!r} in {sig}")
        if name == "pick":
            robot, obj, loc = action.args
            _need_object(scene, obj, sig)
            _need_location(scene, loc, sig)
            stages += [
                Stage("move-to-pregrasp", robot, target_object=obj,
                      source_step=step, source_action=sig),
                Stage("grasp", robot, target_object=obj,
                      source_step=step, source_action=sig),
                Stage("retreat", robot, source_step=step, source_action=sig),
            ]
        elif name == "place":
            robot, obj, loc = action.args
            _need_object(scene, obj, sig)
            _need_location(scene, loc, sig)
            stages += [
                Stage("transfer", robot, target_object=obj, target_location=loc,
                      source_step=step, source_action=sig),
                Stage("place-release", robot, target_object=obj,
                      target_location=loc, source_step=step, source_action=sig),
            ]
        elif name == "equip_tool":
            robot, tool, loc, _obj = action.args
            _need_object(scene, tool, sig)
            _need_location(scene, loc, sig)
            stages += [
                Stage("move-to-pregrasp", robot, target_object=tool,
                      target_location=loc, source_step=step, source_action=sig),
                Stage("grasp", robot, target_object=tool, target_location=loc,
                      source_step=step, source_action=sig),
                Stage("retreat", robot, source_step=step, source_action=sig),
            ]
        elif name == "unequip_tool":
            robot, tool, loc = action.args
            _need_object(scene, tool, sig)
            _need_location(scene, loc, sig)
            stages += [
                Stage("transfer", robot, target_object=tool, target_location=loc,
                      source_step=step, source_action=sig),
                Stage("place-release", robot, target_object=tool,
                      target_location=loc, source_step=step, source_action=sig),
            ]
        elif name == "fixture":
            robot, obj, loc = action.args
            _need_object(scene, obj, sig)
            _need_location(scene, loc, sig)
            stages += [
                Stage("move-to-pregrasp", robot, target_object=obj,
                      source_step=step, source_action=sig),
                Stage("fixture-hold", robot, target_object=obj,
                      target_location=loc, source_step=step, source_action=sig),
            ]
        elif name == "slice":
            robot, tool, obj, loc = action.args
            _need_object(scene, obj, sig)
            _need_location(scene, loc, sig)
            pin = _slice_pin(scene, robot, loc)
            stages.append(Stage("skill", robot, target_object=obj,
                                target_location=loc, skill="slice",
                                source_step=step, source_action=sig,
                                pose_constraint=pin, required_tool=tool))
        elif name == "clean_up":
            robot, obj = action.args
            stages.append(Stage("retreat", robot, target_object=obj,
                                source_step=step, source_action=sig,
                                releases_hold=True))
        elif name == "serve_food":
            robot, obj, loc1, loc2 = action.args
            _need_object(scene, obj, sig)
            _need_location(scene, loc1, sig)
            _need_location(scene, loc2, sig)
            for _ in range(config.serve_count):
                stages += [
                    Stage("grasp", robot, target_object=obj,
                          source_step=step, source_action=sig),
                    Stage("transfer", robot, target_object=obj,
                          target_location=loc2, source_step=step,
                          source_action=sig),
                    Stage("place-release", robot, target_object=obj,
                          target_location=loc2, source_step=step,
                          source_action=sig, allow_occupied=True),
                ]
        else:
            raise StageCompileError(f"no stage mapping for action {sig}")
    return StagePipeline(tuple(stages))


def _slice_pin(scene: SceneModel, robot: str, loc: str) -> tuple[float, float, float]:
    """Slice-start tool pose: at the workspace center, wrist pointing from the
    acting robot's base toward the workspace."""
    base = scene.robots[robot].base
    center = scene.locations[loc].center
    angle = math.atan2(center[1] - base[1], center[0] - base[0])
    return (center[0], center[1], angle)


def _need_object(scene: SceneModel, obj: str, sig: str) -> None:
    if obj not in scene.objects:
        raise StageCompileError(f"unknown object {obj!r} in {sig}")


def _need_location(scene: SceneModel, loc: str, sig: str) -> None:
    if loc not in scene.locations:
        raise StageCompileError(f"unknown location {loc!r} in {sig}")
