"""Independent re-checker for motion solutions.

Replays a bound pipeline from scratch, recomputing each tool point from its
recorded sample parameters and re-evaluating every geometric predicate with
its own primitives. Shares no code with the sampler on purpose: this is the
second route of the dual check.
"""
from __future__ import annotations

import math

from .satisfy import MotionSolution
from .scene import SceneModel
from .stages import MotionConfig, StagePipeline


def _norm(v):
    return math.sqrt(v[0] * v[0] + v[1] * v[1])


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _closest_gap(a0, a1, b0, b1, samples: int = 64) -> float:
    """Minimum distance between two segments by dense parameter sweep."""
    best = float("inf")
    for i in range(samples + 1):
        t = i / samples
        p = (a0[0] + t * (a1[0] - a0[0]), a0[1] + t * (a1[1] - a0[1]))
        # exact distance from point to segment b
        d = _point_to_segment(p, b0, b1)
        if d < best:
            best = d
    return best


def _point_to_segment(p, a, b) -> float:
    ab = _sub(b, a)
    denom = ab[0] * ab[0] + ab[1] * ab[1]
    if denom == 0:
        return _norm(_sub(p, a))
    t = ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / denom
    t = min(1.0, max(0.0, t))
    proj = (a[0] + t * ab[0], a[1] + t * ab[1])
    return _norm(_sub(p, proj))


def verify_solution(pipeline: StagePipeline, scene: SceneModel,
                    solution: MotionSolution,
                    config: MotionConfig = MotionConfig()) -> list[str]:
    """Replay all geometric predicates over the bound poses.

    Returns a list of violation descriptions; an empty list means the
    solution re-verifies clean.
    """
    violations: list[str] = []
    if len(solution.bindings) != len(pipeline.stages):
        return [f"binding count {len(solution.bindings)} != stage count "
                f"{len(pipeline.stages)}"]

    positions = {n: o.position for n, o in scene.objects.items()}
    carried: dict[str, str] = {}
    holds: dict[str, tuple] = {}

    for stage, binding in zip(pipeline.stages, solution.bindings):
        robot = scene.robots[stage.robot]
        tag = f"stage {binding.stage_index} '{stage.name}'"

        if stage.kind == "retreat":
            if stage.releases_hold:
                holds.pop(stage.robot, None)
            continue

        # recompute the commanded tool point from the recorded parameters
        if stage.kind in ("transfer", "place-release"):
            anchor = scene.locations[stage.target_location].center
        elif stage.kind == "skill":
            anchor = (stage.pose_constraint[0], stage.pose_constraint[1])
        elif stage.target_object is not None:
            anchor = positions[stage.target_object]
        else:
            anchor = scene.locations[stage.target_location].center
        expected = (anchor[0] + binding.approach_offset[0],
                    anchor[1] + binding.approach_offset[1])
        if _norm(_sub(expected, binding.tool_point)) > 1e-9:
            violations.append(f"{tag}: recorded tool point diverges from its "
                              f"sample parameters")

        if stage.samples_pose:
            off = _norm(binding.approach_offset)
            if all(abs(off - d) > 1e-9 for d in config.approach_offsets):
                violations.append(f"{tag}: approach offset {off:.4f} not on the grid")

        if _norm(_sub(binding.tool_point, robot.base)) > robot.reach + 1e-9:
            violations.append(f"{tag}: tool point beyond {stage.robot} reach")

        if stage.kind == "skill":
            pin = stage.pose_constraint
            gap = _norm(_sub(binding.tool_point, (pin[0], pin[1])))
            if gap > config.position_tolerance:
                violations.append(f"{tag}: skill start pose {gap:.4f} m away "
                                  f"from its pinned constraint")
            if carried.get(stage.robot) != stage.required_tool:
                violations.append(f"{tag}: {stage.robot} does not hold "
                                  f"{stage.required_tool}")

        if stage.kind == "place-release" and not stage.allow_occupied:
            loc = scene.locations[stage.target_location]
            in_hand = set(carried.values())
            for name in sorted(positions):
                if name == stage.target_object or name in in_hand:
                    continue
                if _norm(_sub(positions[name], loc.center)) <= loc.radius:
                    violations.append(f"{tag}: release target "
                                      f"{stage.target_location} occupied by {name}")

        for other, (hold_point, _obj) in sorted(holds.items()):
            if other == stage.robot:
                continue
            other_robot = scene.robots[other]
            gap = _closest_gap(robot.base, binding.tool_point,
                               other_robot.base, hold_point)
            if gap < robot.clearance + other_robot.clearance - 1e-9:
                violations.append(f"{tag}: arm of {stage.robot} within "
                                  f"{gap:.4f} m of {other}'s held arm")

        if stage.kind == "grasp":
            carried[stage.robot] = stage.target_object
        elif stage.kind == "place-release":
            positions[stage.target_object] = scene.locations[stage.target_location].center
            carried.pop(stage.robot, None)
        elif stage.kind == "fixture-hold":
            holds[stage.robot] = (binding.tool_point, stage.target_object)

    return violations
