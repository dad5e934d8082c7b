"""Inputs to problem generation: knowledge, observations, instructions, config."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..pddl.model import Domain
from ..geometry.feedback import PlanningFeedback


@dataclass(frozen=True)
class DomainKnowledge:
    domain: Domain
    characteristics: tuple[tuple[str, str], ...] = ()  # (label, description)

    def __post_init__(self):
        labels = [l for l, _ in self.characteristics]
        if len({l.lower() for l in labels}) != len(labels):
            raise ValueError("characteristic labels must be unique")


@dataclass(frozen=True)
class Detection:
    label: str
    bbox: tuple[int, int, int, int]  # xmin, ymin, xmax, ymax in pixels

    def __post_init__(self):
        xmin, ymin, xmax, ymax = self.bbox
        if not (xmin < xmax and ymin < ymax):
            raise ValueError(f"degenerate bbox for {self.label}: {self.bbox}")
        if not self.label:
            raise ValueError("empty detection label")

    def render(self) -> str:
        return f"{self.label} [{', '.join(str(v) for v in self.bbox)}]"


@dataclass(frozen=True)
class SceneObservation:
    detections: tuple[Detection, ...] = ()
    fixed_objects: tuple[str, ...] = ()
    image_path: str | None = None


@dataclass(frozen=True)
class Instruction:
    text: str
    arm_restriction: str = "both"  # "both" | "single"

    def __post_init__(self):
        if not self.text:
            raise ValueError("instruction text must be nonempty")
        if self.arm_restriction not in ("both", "single"):
            raise ValueError(f"unknown arm restriction {self.arm_restriction!r}")


@dataclass(frozen=True)
class GenConfig:
    use_cot: bool = True
    icl_examples: int = 0  # 0 or 1
    samples_per_problem: int = 5
    temperature: float = 0.7

    def __post_init__(self):
        if self.icl_examples not in (0, 1):
            raise ValueError("icl_examples must be 0 or 1")
        if self.samples_per_problem < 0:
            raise ValueError("samples_per_problem must be non-negative")


@dataclass(frozen=True)
class IclExample:
    """Slot values for one in-context example block."""

    objects: str = ""
    bounding_boxes: str = ""
    initial_state: str = ""
    instruction: str = ""
    goal_state: str = ""


@dataclass
class CorrectionHistory:
    """Paired prior problems (or plans) and the feedback each received."""

    problems: list[str] = field(default_factory=list)
    feedbacks: list[PlanningFeedback] = field(default_factory=list)

    def __post_init__(self):
        if len(self.problems) != len(self.feedbacks):
            raise ValueError("history problems and feedbacks must pair up")

    def append(self, problem_text: str, feedback: PlanningFeedback) -> None:
        self.problems.append(problem_text)
        self.feedbacks.append(feedback)

    def __len__(self) -> int:
        return len(self.problems)

    def pairs(self) -> list[tuple[str, PlanningFeedback]]:
        return list(zip(self.problems, self.feedbacks))


_IDENT_STRIP = re.compile(r"[^a-z0-9_]")


def normalize_label(label: str) -> str:
    """Free-text object label to PDDL identifier: lowercase, spaces to
    underscores, other non-alphanumerics stripped."""
    ident = label.strip().lower().replace(" ", "_")
    ident = _IDENT_STRIP.sub("", ident)
    return ident
