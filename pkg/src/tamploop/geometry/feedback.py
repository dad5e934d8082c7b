"""Three-part planner failure feedback: comments, execution trace, message."""
from __future__ import annotations

from dataclasses import dataclass, field

from .satisfy import MotionFailure
from .stages import StagePipeline

ALL_PARTS = ("comments", "trace", "message")


@dataclass(frozen=True)
class PlanningFeedback:
    comments: tuple[str, ...]
    trace: tuple[tuple[str, str], ...]  # (stage name [robot], ok|failed|not-reached)
    message: str
    origin: str  # "task-planner" | "motion-planner"

    def to_dict(self, parts: tuple[str, ...] = ALL_PARTS) -> dict:
        data: dict = {"origin": self.origin}
        if "comments" in parts:
            data["comments"] = list(self.comments)
        if "trace" in parts:
            data["trace"] = [[name, status] for name, status in self.trace]
        if "message" in parts:
            data["message"] = self.message
        return data

    @staticmethod
    def from_dict(data: dict) -> "PlanningFeedback":
        return PlanningFeedback(
            tuple(data.get("comments", ())),
            tuple((name, status) for name, status in data.get("trace", ())),
            data.get("message", ""),
            data["origin"])

    def render_text(self, parts: tuple[str, ...] = ALL_PARTS) -> str:
        """Plain-text form used to fill the "{feedback}" prompt slot."""
        sections = []
        if "comments" in parts and self.comments:
            sections.append("Failure comments:\n"
                            + "\n".join(f"- {c}" for c in self.comments))
        if "trace" in parts and self.trace:
            lines = [f"{i + 1}. {name}: {status}"
                     for i, (name, status) in enumerate(self.trace)]
            sections.append("Task execution trace:\n" + "\n".join(lines))
        if "message" in parts and self.message:
            sections.append("Failure message:\n" + self.message)
        return "\n\n".join(sections) if sections else "planning failed"


def synthesize_feedback(failure: MotionFailure,
                        pipeline: StagePipeline) -> PlanningFeedback:
    """Build the motion-planner feedback for a failed pipeline.

    The trace marks stages before the failure ok, the failed stage failed and
    the rest not-reached; the message names the acting robot, stage, target
    and cause (both robots and the fixtured context for arm conflicts).
    """
    stage = pipeline.stages[failure.failed_stage]
    trace = []
    for i, s in enumerate(pipeline.stages):
        status = ("ok" if i < failure.failed_stage
                  else "failed" if i == failure.failed_stage else "not-reached")
        trace.append((f"{s.name} [{s.robot}]", status))

    target = stage.target_object or stage.target_location or stage.skill or "?"
    comments = [f"Stage '{stage.name}' of step {stage.source_step} "
                f"({stage.source_action}) failed for robot {stage.robot}: "
                f"{failure.reason} after {failure.attempted_samples} "
                f"sampling attempt(s)."]
    if failure.detail:
        comments.append(failure.detail)

    where = f" at {stage.target_location}" if stage.target_location else ""
    if failure.reason == "out-of-reach":
        cause = (f"{stage.robot} cannot reach {target}{where}: every sampled "
                 f"approach pose lies outside its reachable workspace")
    elif failure.reason == "location-occupied":
        blocker = failure.detail or f"location {stage.target_location} is occupied"
        cause = (f"{stage.robot} cannot place {target} because "
                 f"{blocker}")
    elif failure.reason == "arm-conflict":
        a, b = failure.colliding_pair
        cause = (f"there is a collision between {a} and {b}: every sampled "
                 f"pose for {a} intersects the arm of {b}, which is in a "
                 f"fixture pose")
    elif failure.reason == "skill-pose-constraint":
        cause = (f"the start pose constraint of skill '{stage.skill}' cannot "
                 f"be satisfied: {failure.detail or 'the pinned pose is unreachable'}")
    else:
        cause = (f"the sampling budget was exhausted without a consistent "
                 f"binding ({failure.detail or 'mixed failure causes'})")

    message = (f"Motion planning failed while executing {stage.source_action} "
               f"(stage '{stage.name}', robot {stage.robot}): {cause}. "
               f"Stages before '{stage.name}' planned successfully; "
               f"later stages were not reached.")
    return PlanningFeedback(tuple(comments), tuple(trace), message,
                            origin="motion-planner")
