"""Language-model interface: prompts, clients, estimators, revision."""

from .data import (
    CorrectionHistory,
    Detection,
    DomainKnowledge,
    GenConfig,
    IclExample,
    Instruction,
    SceneObservation,
    normalize_label,
)
from .chat import (
    ChatError,
    ChatHttpError,
    ChatModel,
    ChatRequest,
    ChatResponse,
    ChatTimeoutError,
    ChatTransportError,
    GoldAnswers,
    HttpChatModel,
    OracleModel,
    RecordedModel,
    RecordingModel,
    TranscriptMissError,
)
from .extract import ExtractionError, extract_block, parse_detections
from .generate import (
    BaselinePlanError,
    GeneratedSpec,
    GenerationError,
    RevisionResult,
    assemble_problem_text,
    baseline_generate_plan,
    baseline_revise_plan,
    estimate_goal,
    estimate_init,
    estimate_objects,
    generate_problem,
    generate_spec,
    revise_problem,
)

__all__ = [
    "CorrectionHistory", "Detection", "DomainKnowledge", "GenConfig",
    "IclExample", "Instruction", "SceneObservation", "normalize_label",
    "ChatError", "ChatHttpError", "ChatModel", "ChatRequest", "ChatResponse",
    "ChatTimeoutError", "ChatTransportError", "GoldAnswers", "HttpChatModel",
    "OracleModel", "RecordedModel", "RecordingModel", "TranscriptMissError",
    "ExtractionError", "extract_block", "parse_detections",
    "BaselinePlanError", "GeneratedSpec", "GenerationError", "RevisionResult",
    "assemble_problem_text", "baseline_generate_plan", "baseline_revise_plan",
    "estimate_goal", "estimate_init", "estimate_objects", "generate_problem",
    "generate_spec", "revise_problem",
]
