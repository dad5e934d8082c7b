"""Metric computation, failure-mode classification and suite reports."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from ..loop import TrialRecord
from .suite import TaskInstance

MODE_LABELS = {
    1: "non-existing objects/locations",
    2: "manipulation planning failure",
    3: "task planning failure",
    4: "successful plan but wrong goal",
}


@dataclass(frozen=True)
class Metrics:
    trials: int
    success_rate: float
    r_syntax: float | None
    r_plan: float | None
    avg_task_attempts: float
    avg_motion_attempts: float
    planning_time_mean: float | None
    planning_time_std: float | None
    failure_modes: dict = field(default_factory=dict)

    def __post_init__(self):
        for value in (self.success_rate, self.r_syntax, self.r_plan):
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"fraction out of range: {value}")

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "success_rate": round(self.success_rate, 6),
            "r_syntax": None if self.r_syntax is None else round(self.r_syntax, 6),
            "r_plan": None if self.r_plan is None else round(self.r_plan, 6),
            "avg_task_attempts": round(self.avg_task_attempts, 6),
            "avg_motion_attempts": round(self.avg_motion_attempts, 6),
            "planning_time_mean": (None if self.planning_time_mean is None
                                   else round(self.planning_time_mean, 6)),
            "planning_time_std": (None if self.planning_time_std is None
                                  else round(self.planning_time_std, 6)),
            "failure_modes": {str(k): v for k, v in
                              sorted(self.failure_modes.items())},
        }


def goal_matched(record: TrialRecord, instance: TaskInstance) -> bool:
    """True iff the trial succeeded and its final state satisfies the gold
    goal conjunction."""
    if record.outcome != "success":
        return False
    final = {s.lower() for s in record.final_state}
    for lit in instance.gold_problem.goal:
        holds = lit.atom.render().lower() in final
        if holds == lit.negated:
            return False
    return True


def classify_failure(record: TrialRecord, instance: TaskInstance) -> int:
    """Failure mode, judged against the gold annotations.

    Precedence: (1) hallucinated objects/locations, (2) terminal feedback
    from the motion planner, (3) task-planner or syntax failure,
    (4) a solution that misses the gold goal.
    """
    matched = goal_matched(record, instance)
    if record.outcome == "success" and matched:
        raise ValueError("classify_failure called on a clean success")

    gold = {o.lower() for o in instance.gold_problem.objects}
    generated = {o.lower() for o in record.generated_objects}
    if generated - gold:
        return 1
    feedback = record.terminal_feedback
    if feedback is not None and feedback.origin == "motion-planner":
        return 2
    if record.outcome != "success":
        return 3
    return 4


def compute_metrics(records: list[TrialRecord],
                    instances: list[TaskInstance]) -> Metrics:
    """Pure fold over trial records; record order never matters."""
    if not records:
        raise ValueError("no records to compute metrics over")
    by_id = {i.instance_id: i for i in instances}
    successes = 0
    syntax_bits: list[bool] = []
    plan_bits: list[bool] = []
    task_attempts = 0
    motion_attempts = 0
    times: list[float] = []
    modes: dict[int, int] = {}
    for record in sorted(records, key=lambda r: (r.problem_id, r.trial_index,
                                                 r.pipeline)):
        instance = by_id[record.problem_id]
        matched = goal_matched(record, instance)
        if matched:
            successes += 1
        else:
            mode = classify_failure(record, instance)
            modes[mode] = modes.get(mode, 0) + 1
        if record.syntax_ok is not None:
            syntax_bits.append(record.syntax_ok)
            if record.syntax_ok and record.plan_ok is not None:
                plan_bits.append(record.plan_ok)
        task_attempts += record.attempts.get("task", 0)
        motion_attempts += record.attempts.get("motion", 0)
        if record.timings.get("total") is not None:
            times.append(record.timings["total"])
    n = len(records)
    mean = sum(times) / len(times) if times else None
    std = (math.sqrt(sum((t - mean) ** 2 for t in times) / len(times))
           if times else None)
    return Metrics(
        trials=n,
        success_rate=successes / n,
        r_syntax=(sum(syntax_bits) / len(syntax_bits)) if syntax_bits else None,
        r_plan=(sum(plan_bits) / len(plan_bits)) if plan_bits else None,
        avg_task_attempts=task_attempts / n,
        avg_motion_attempts=motion_attempts / n,
        planning_time_mean=mean,
        planning_time_std=std,
        failure_modes=modes)


def metrics_by_task(records: list[TrialRecord],
                    instances: list[TaskInstance]) -> dict[str, Metrics]:
    """Per-kind metrics plus the "all" aggregate."""
    kinds = sorted({i.kind for i in instances})
    out: dict[str, Metrics] = {}
    for kind in kinds:
        ids = {i.instance_id for i in instances if i.kind == kind}
        subset = [r for r in records if r.problem_id in ids]
        if subset:
            out[kind] = compute_metrics(subset, instances)
    out["all"] = compute_metrics(records, instances)
    return out


def report(metrics_by_config: dict[str, dict[str, Metrics]]) -> tuple[str, dict]:
    """Plain-text table (configurations x tasks) plus the JSON document.

    With two or more configurations a success-rate delta column against the
    first configuration is added. Missing task rows are omitted, not
    zero-filled.
    """
    if not metrics_by_config:
        raise ValueError("no metrics to report")
    configs = list(metrics_by_config)
    tasks: list[str] = []
    for per_task in metrics_by_config.values():
        for name in per_task:
            if name != "all" and name not in tasks:
                tasks.append(name)
    tasks.sort()
    rows = tasks + ["all"]

    headers = ["task"] + configs
    if len(configs) > 1:
        headers += [f"delta({c})" for c in configs[1:]]
    table = [headers]
    for row in rows:
        cells = [row]
        base = None
        for config in configs:
            m = metrics_by_config[config].get(row)
            if m is None:
                cells.append("-")
                continue
            if base is None:
                base = m.success_rate
            cells.append(f"{m.success_rate * 100:.1f}")
        if len(configs) > 1:
            for config in configs[1:]:
                m = metrics_by_config[config].get(row)
                ref = metrics_by_config[configs[0]].get(row)
                if m is None or ref is None:
                    cells.append("-")
                else:
                    cells.append(f"{(m.success_rate - ref.success_rate) * 100:+.1f}")
        table.append(cells)

    widths = [max(len(r[c]) for r in table) for c in range(len(headers))]
    lines = ["success rate (%) by configuration"]
    for r, row in enumerate(table):
        lines.append("  ".join(cell.ljust(widths[i])
                               for i, cell in enumerate(row)))
        if r == 0:
            lines.append("  ".join("-" * w for w in widths))

    lines.append("")
    lines.append("failure modes (count per configuration)")
    for config in configs:
        m = metrics_by_config[config].get("all")
        if m is None:
            continue
        parts = [f"mode {k} ({MODE_LABELS[k]}): {v}"
                 for k, v in sorted(m.failure_modes.items())]
        lines.append(f"{config}: " + ("; ".join(parts) if parts else "none"))

    doc = {config: {task: m.to_dict() for task, m in per_task.items()}
           for config, per_task in metrics_by_config.items()}
    return "\n".join(lines) + "\n", doc
