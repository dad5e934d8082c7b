"""Driving trials over a suite: model wiring, parallel execution, run logs.

Trial logs are line-delimited JSON with stable field ordering and no timing
data, so identical seeds reproduce byte-identical files; wall-clock timings
go to a separate sidecar that carries no determinism guarantee.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

from ..interpreter import ChatModel, GoldAnswers, OracleModel
from ..loop import OrchestratorConfig, TrialRecord, run_trial
from ..pddl.render import render_goal_block, render_init_block
from .suite import TaskInstance, icl_pool_for


def oracle_model_for(instance: TaskInstance) -> OracleModel:
    """Ground-truth responder for one instance, built from its gold data."""
    gold = instance.gold_problem
    detection_text = "\n".join(d.render()
                               for d in instance.observation.detections)
    plan_json = "[" + ", ".join(f'"{s}"' for s in instance.gold_plan) + "]"
    return OracleModel(GoldAnswers(
        detection_text=detection_text,
        objects_block="(:objects " + " ".join(gold.objects) + ")",
        init_block=render_init_block(gold),
        goal_block=render_goal_block(gold),
        plan_json=plan_json))


def run_suite(instances: list[TaskInstance], config: OrchestratorConfig,
              model_factory: Callable[[TaskInstance], ChatModel],
              samples: int = 5, parallelism: int = 1,
              progress: Callable[[TrialRecord], None] | None = None
              ) -> list[TrialRecord]:
    """samples independent trials per instance, in deterministic order."""
    jobs = []
    for instance in instances:
        pool = icl_pool_for(instance, instances)
        model = model_factory(instance)
        for trial_index in range(samples):
            jobs.append((instance, model, pool, trial_index))

    def work(job):
        instance, model, pool, trial_index = job
        return run_trial(instance, config, model, icl_pool=pool,
                         trial_index=trial_index)

    if parallelism <= 1:
        records = []
        for job in jobs:
            record = work(job)
            records.append(record)
            if progress:
                progress(record)
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool_exec:
            records = list(pool_exec.map(work, jobs))
        if progress:
            for record in records:
                progress(record)
    return records


def record_line(record: TrialRecord) -> str:
    return json.dumps(record.to_dict(), sort_keys=True,
                      separators=(",", ":"))


def write_trials_jsonl(records: list[TrialRecord], path: str | Path) -> None:
    Path(path).write_text(
        "".join(record_line(r) + "\n" for r in records), encoding="utf-8")


def write_timings_jsonl(records: list[TrialRecord], path: str | Path) -> None:
    lines = []
    for r in records:
        lines.append(json.dumps(
            {"problem_id": r.problem_id, "trial_index": r.trial_index,
             "timings": {k: round(v, 6) for k, v in sorted(r.timings.items())}},
            sort_keys=True, separators=(",", ":")) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def load_trials_jsonl(path: str | Path) -> list[dict]:
    out = []
    for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError as err:
            raise ValueError(f"truncated or corrupt log line {lineno}: {err}")
    return out
