"""Deterministic planar geometric feasibility backend."""

from .scene import (
    LocationModel,
    ObjectModel,
    RobotModel,
    SceneError,
    SceneModel,
    dist,
    reachability_facts,
)
from .stages import MotionConfig, Stage, StageCompileError, StagePipeline, compile_stages
from .satisfy import (
    MotionFailure,
    MotionSolution,
    StageBinding,
    satisfy,
    seg_seg_distance,
)
from .feedback import ALL_PARTS, PlanningFeedback, synthesize_feedback
from .verify import verify_solution

__all__ = [
    "LocationModel", "ObjectModel", "RobotModel", "SceneError", "SceneModel",
    "dist", "reachability_facts",
    "MotionConfig", "Stage", "StageCompileError", "StagePipeline", "compile_stages",
    "MotionFailure", "MotionSolution", "StageBinding", "satisfy", "seg_seg_distance",
    "ALL_PARTS", "PlanningFeedback", "synthesize_feedback",
    "verify_solution",
]
