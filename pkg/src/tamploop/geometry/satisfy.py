"""Greedy per-stage motion satisfaction with seeded sampling.

Each stage draws grasp angle / approach offset candidates from a seeded
permutation of a fixed grid and binds the first candidate passing the reach,
occupancy and arm-conflict checks; a stage whose attempt budget exhausts
yields the motion failure. There is no cross-stage backtracking: persistent
fixture holds are instead co-checked against the pinned skill poses they
overlap, which resolves the fixture/slice interdependence during sampling.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .scene import SceneModel, Vec, dist
from .stages import MotionConfig, Stage, StagePipeline


@dataclass(frozen=True)
class StageBinding:
    stage_index: int
    grasp_angle: float
    approach_offset: Vec
    sample_index: int
    tool_point: Vec


@dataclass(frozen=True)
class MotionSolution:
    bindings: tuple[StageBinding, ...]

    @property
    def makespan(self) -> int:
        return len(self.bindings)

    def to_dict(self) -> dict:
        return {"makespan": self.makespan,
                "bindings": [{"stage": b.stage_index,
                              "grasp_angle": round(b.grasp_angle, 9),
                              "approach_offset": [round(v, 9) for v in b.approach_offset],
                              "sample_index": b.sample_index,
                              "tool_point": [round(v, 9) for v in b.tool_point]}
                             for b in self.bindings]}


@dataclass(frozen=True)
class MotionFailure:
    failed_stage: int
    reason: str  # out-of-reach | location-occupied | arm-conflict | skill-pose-constraint | samples-exhausted
    attempted_samples: int
    colliding_pair: tuple[str, str] | None = None
    detail: str = ""

    def __post_init__(self):
        if (self.reason == "arm-conflict") != (self.colliding_pair is not None):
            raise ValueError("colliding pair set iff reason is arm-conflict")

    def to_dict(self) -> dict:
        return {"failed_stage": self.failed_stage, "reason": self.reason,
                "attempted_samples": self.attempted_samples,
                "colliding_pair": list(self.colliding_pair) if self.colliding_pair else None,
                "detail": self.detail}


def seg_seg_distance(p1: Vec, p2: Vec, q1: Vec, q2: Vec) -> float:
    """Minimum distance between two planar segments."""
    if _segments_intersect(p1, p2, q1, q2):
        return 0.0
    return min(_point_seg(p1, q1, q2), _point_seg(p2, q1, q2),
               _point_seg(q1, p1, p2), _point_seg(q2, p1, p2))


def _point_seg(p: Vec, a: Vec, b: Vec) -> float:
    ax, ay = b[0] - a[0], b[1] - a[1]
    denom = ax * ax + ay * ay
    if denom == 0:
        return dist(p, a)
    t = ((p[0] - a[0]) * ax + (p[1] - a[1]) * ay) / denom
    t = max(0.0, min(1.0, t))
    return dist(p, (a[0] + t * ax, a[1] + t * ay))


def _segments_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) < 1e-12 else (1 if v > 0 else -1)

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return False


class _WorldState:
    """Mutable view of the scene as the pipeline executes."""

    def __init__(self, scene: SceneModel):
        self.scene = scene
        self.positions: dict[str, Vec] = {n: o.position for n, o in scene.objects.items()}
        self.held: dict[str, str | None] = {r: None for r in scene.robots}
        for r in scene.robots.values():
            if r.gripper != "empty":
                self.held[r.name] = r.gripper
        self.holds: dict[str, tuple[Vec, str]] = {}  # robot -> (tool point, object)

    def occupied_by(self, loc_name: str, ignore: str) -> str | None:
        loc = self.scene.locations[loc_name]
        carried = {o for o in self.held.values() if o}
        for name in sorted(self.positions):
            if name == ignore or name in carried:
                continue
            if dist(self.positions[name], loc.center) <= loc.radius:
                return name
        return None


def _grid(config: MotionConfig) -> list[tuple[float, float]]:
    out = []
    for i in range(config.angle_count):
        angle = 2.0 * math.pi * i / config.angle_count
        for d in config.approach_offsets:
            out.append((angle, d))
    return out


def _stage_samples(stage: Stage, stage_index: int, seed: int,
                   config: MotionConfig, attempts: int):
    """Deterministic per-stage candidate stream: a seeded permutation of the
    fixed angle/offset grid (pose-sampling stages) or the single fixed pose."""
    if not stage.samples_pose:
        yield (0, 0.0, (0.0, 0.0))
        return
    grid = _grid(config)
    order = list(range(len(grid)))
    rng = random.Random(seed * 1_000_003 + stage_index * 7919 + 17)
    rng.shuffle(order)
    for k, gi in enumerate(order[:max(1, min(attempts, len(grid)))]):
        angle, d = grid[gi]
        yield (k, angle, (d * math.cos(angle), d * math.sin(angle)))


def satisfy(pipeline: StagePipeline, scene: SceneModel, attempts: int = 32,
            seed: int = 0, config: MotionConfig = MotionConfig()
            ) -> MotionSolution | MotionFailure:
    """Bind every stage in order; deterministic given the seed.

    Checks per candidate pose: (a) the tool point lies within the acting
    robot's reach, (b) release targets are unoccupied, (c) the transient arm
    segment keeps clearance from all persistent holds (and, when opening a
    hold, from every pinned skill pose the hold will overlap), (d) skill
    stages require the pinned tool in hand.
    """
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    world = _WorldState(scene)
    bindings: list[StageBinding] = []

    for index, stage in enumerate(pipeline.stages):
        robot = scene.robots[stage.robot]

        if stage.kind == "retreat":
            if stage.releases_hold:
                world.holds.pop(stage.robot, None)
            bindings.append(StageBinding(index, 0.0, (0.0, 0.0), 0, robot.base))
            continue

        target = _stage_target(stage, world)
        reasons: dict[str, int] = {}
        pair: tuple[str, str] | None = None
        detail = ""
        tried = 0
        bound = None

        for k, angle, offset in _stage_samples(stage, index, seed, config, attempts):
            tried += 1
            tool_point = (target[0] + offset[0], target[1] + offset[1])
            verdict, info = _check_pose(stage, index, tool_point, world,
                                        pipeline, scene, config)
            if verdict is None:
                bound = StageBinding(index, angle, offset, k, tool_point)
                break
            reasons[verdict] = reasons.get(verdict, 0) + 1
            if verdict == "arm-conflict" and pair is None:
                pair = info
            elif verdict != "arm-conflict" and not detail:
                detail = info or ""

        if bound is None:
            reason = _dominant_reason(reasons)
            return MotionFailure(index, reason, tried,
                                 colliding_pair=pair if reason == "arm-conflict" else None,
                                 detail=detail)

        bindings.append(bound)
        _apply_stage(stage, bound, world)

    return MotionSolution(tuple(bindings))


def _stage_target(stage: Stage, world: _WorldState) -> Vec:
    if stage.kind in ("transfer", "place-release"):
        return world.scene.locations[stage.target_location].center
    if stage.kind == "skill":
        return (stage.pose_constraint[0], stage.pose_constraint[1])
    if stage.target_object is not None:
        return world.positions[stage.target_object]
    return world.scene.locations[stage.target_location].center


def _check_pose(stage: Stage, index: int, tool_point: Vec, world: _WorldState,
                pipeline: StagePipeline, scene: SceneModel,
                config: MotionConfig):
    """Returns (None, None) on success or (reason, info)."""
    robot = scene.robots[stage.robot]

    if stage.kind == "skill":
        held = world.held.get(stage.robot)
        if stage.required_tool is not None and held != stage.required_tool:
            return ("skill-pose-constraint",
                    f"{stage.robot} does not hold {stage.required_tool} "
                    f"at the pinned start pose")

    if dist(robot.base, tool_point) > robot.reach:
        return ("out-of-reach", f"target at distance "
                f"{dist(robot.base, tool_point):.3f} m exceeds reach {robot.reach:.3f} m")

    if stage.kind == "place-release" and not stage.allow_occupied:
        blocker = world.occupied_by(stage.target_location, stage.target_object)
        if blocker is not None:
            return ("location-occupied",
                    f"location {stage.target_location} already holds {blocker}")

    segment = (robot.base, tool_point)
    for other, (hold_point, hold_obj) in sorted(world.holds.items()):
        if other == stage.robot:
            continue
        other_robot = scene.robots[other]
        gap = seg_seg_distance(segment[0], segment[1],
                               other_robot.base, hold_point)
        if gap < robot.clearance + other_robot.clearance:
            return ("arm-conflict", (stage.robot, other))

    if stage.kind == "fixture-hold":
        # co-parameter check: the hold must stay clear of every pinned skill
        # pose it will overlap, up to the matching clean_up retreat
        for later in pipeline.stages[index + 1:]:
            if (later.kind == "retreat" and later.releases_hold
                    and later.robot == stage.robot
                    and later.target_object == stage.target_object):
                break
            if later.kind == "skill" and later.robot != stage.robot:
                skill_robot = scene.robots[later.robot]
                pin = (later.pose_constraint[0], later.pose_constraint[1])
                gap = seg_seg_distance(segment[0], segment[1],
                                       skill_robot.base, pin)
                if gap < robot.clearance + skill_robot.clearance:
                    return ("arm-conflict", (stage.robot, later.robot))

    return (None, None)


def _apply_stage(stage: Stage, binding: StageBinding, world: _WorldState) -> None:
    if stage.kind == "grasp":
        world.held[stage.robot] = stage.target_object
    elif stage.kind == "place-release":
        world.positions[stage.target_object] = \
            world.scene.locations[stage.target_location].center
        world.held[stage.robot] = None
    elif stage.kind == "fixture-hold":
        world.holds[stage.robot] = (binding.tool_point, stage.target_object)


def _dominant_reason(reasons: dict[str, int]) -> str:
    if not reasons:
        return "samples-exhausted"
    if len(reasons) == 1:
        return next(iter(reasons))
    priority = ["arm-conflict", "location-occupied", "out-of-reach",
                "skill-pose-constraint"]
    total = sum(reasons.values())
    best = max(sorted(reasons, key=priority.index), key=lambda r: reasons[r])
    if reasons[best] * 2 >= total:
        return best
    return "samples-exhausted"
