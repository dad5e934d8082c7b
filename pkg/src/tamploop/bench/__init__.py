"""Task-suite generation, metrics and failure-mode classification."""

from .suite import (
    CHARACTERISTICS,
    FOODS,
    TASK_KINDS,
    SuiteError,
    TaskInstance,
    build_suite,
    icl_pool_for,
    load_suite,
    write_suite,
)
from .metrics import (
    MODE_LABELS,
    Metrics,
    classify_failure,
    compute_metrics,
    goal_matched,
    metrics_by_task,
    report,
)

__all__ = [
    "CHARACTERISTICS", "FOODS", "TASK_KINDS", "SuiteError", "TaskInstance",
    "build_suite", "icl_pool_for", "load_suite", "write_suite",
    "MODE_LABELS", "Metrics", "classify_failure", "compute_metrics",
    "goal_matched", "metrics_by_task", "report",
]
