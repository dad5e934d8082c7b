"""Corrective-planning orchestrator: generate, solve, revise, bounded retry.

One trial follows the closed loop exactly: initial problem generation, a
TAMP solve, then up to n_cp_max revise/solve rounds, appending each revised
problem and the feedback that drove it to the correction history. The
baseline pipeline generates action sequences directly and validates them
with the step executor plus motion satisfaction instead of planning.
"""
from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .geometry import (
    ALL_PARTS,
    MotionConfig,
    MotionSolution,
    PlanningFeedback,
    SceneModel,
    compile_stages,
    reachability_facts,
    satisfy,
    synthesize_feedback,
)
from .interpreter import (
    BaselinePlanError,
    ChatModel,
    CorrectionHistory,
    GenConfig,
    GenerationError,
    IclExample,
    assemble_problem_text,
    baseline_generate_plan,
    baseline_revise_plan,
    generate_spec,
    revise_problem,
)
from .pddl import PddlParseError, ground, parse_problem
from .pddl.model import Atom, Problem
from .search import PlanSkeleton, SearchConfig
from .tamp import TampFailure, TampSolution, solve
from .validate import simulate, validate_syntax

if TYPE_CHECKING:
    from .bench.suite import TaskInstance


@dataclass(frozen=True)
class OrchestratorConfig:
    n_cp_max: int = 3
    pipeline: str = "vilain-tamp"  # "vilain-tamp" | "baseline"
    feedback_parts: tuple[str, ...] = ALL_PARTS
    auto_facts: bool = False
    seed: int = 0
    strict_history: bool = False  # reset history every round, as printed
    search: SearchConfig = SearchConfig()
    motion: MotionConfig = MotionConfig()
    gen: GenConfig = GenConfig()

    def __post_init__(self):
        if self.n_cp_max < 0:
            raise ValueError("n_cp_max must be >= 0")
        if self.pipeline not in ("vilain-tamp", "baseline"):
            raise ValueError(f"unknown pipeline {self.pipeline!r}")


@dataclass
class TrialRecord:
    task_id: str
    problem_id: str
    trial_index: int
    seed: int
    pipeline: str
    initial_problem: str
    history: CorrectionHistory
    outcome: str  # "success" | "failure"
    failure_phase: str | None
    solution: "TampSolution | LoadedSolution | None"
    attempts: dict
    transcripts: list[tuple[str, str]]
    generated_objects: list[str]
    final_state: list[str]
    syntax_ok: bool | None
    plan_ok: bool | None
    terminal_feedback: PlanningFeedback | None = None
    timings: dict = field(default_factory=dict)

    @property
    def cp_count(self) -> int:
        return len(self.history)

    def to_dict(self, include_timings: bool = False) -> dict:
        data = {
            "task_id": self.task_id,
            "problem_id": self.problem_id,
            "trial_index": self.trial_index,
            "seed": self.seed,
            "pipeline": self.pipeline,
            "initial_problem": self.initial_problem,
            "history": {
                "problems": list(self.history.problems),
                "feedbacks": [f.to_dict() for f in self.history.feedbacks],
            },
            "outcome": self.outcome,
            "failure_phase": self.failure_phase,
            "solution": self.solution.to_dict() if self.solution else None,
            "attempts": dict(self.attempts),
            "transcripts": [[s, d] for s, d in self.transcripts],
            "generated_objects": list(self.generated_objects),
            "final_state": list(self.final_state),
            "syntax_ok": self.syntax_ok,
            "plan_ok": self.plan_ok,
            "terminal_feedback": (self.terminal_feedback.to_dict()
                                  if self.terminal_feedback else None),
        }
        if include_timings:
            data["timings"] = dict(self.timings)
        return data


@dataclass(frozen=True)
class LoadedSolution:
    """Solution payload rehydrated from a run log (serialization only)."""

    data: dict

    def to_dict(self) -> dict:
        return dict(self.data)


def record_from_dict(data: dict) -> TrialRecord:
    """Rebuild a TrialRecord from its run-log line."""
    history = CorrectionHistory(
        list(data["history"]["problems"]),
        [PlanningFeedback.from_dict(f) for f in data["history"]["feedbacks"]])
    terminal = data.get("terminal_feedback")
    return TrialRecord(
        task_id=data["task_id"], problem_id=data["problem_id"],
        trial_index=data["trial_index"], seed=data["seed"],
        pipeline=data["pipeline"], initial_problem=data["initial_problem"],
        history=history, outcome=data["outcome"],
        failure_phase=data.get("failure_phase"),
        solution=LoadedSolution(data["solution"]) if data.get("solution")
        else None,
        attempts=dict(data.get("attempts", {})),
        transcripts=[tuple(t) for t in data.get("transcripts", [])],
        generated_objects=list(data.get("generated_objects", [])),
        final_state=list(data.get("final_state", [])),
        syntax_ok=data.get("syntax_ok"), plan_ok=data.get("plan_ok"),
        terminal_feedback=(PlanningFeedback.from_dict(terminal)
                           if terminal else None),
        timings=dict(data.get("timings", {})))


def derive_trial_seed(task_id: str, problem_id: str, trial_index: int,
                      global_seed: int) -> int:
    key = f"{task_id}|{problem_id}|{trial_index}|{global_seed}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def syntax_feedback(diagnostics) -> PlanningFeedback:
    messages = tuple(d.message for d in diagnostics if d.severity == "error")
    if not messages:
        messages = ("the problem specification could not be parsed",)
    message = ("The problem specification is syntactically invalid: "
               + "; ".join(messages) + ".")
    return PlanningFeedback(messages, (), message, origin="task-planner")


def generation_feedback(error: GenerationError) -> PlanningFeedback:
    comment = f"{error.stage} failed: {error}"
    return PlanningFeedback((comment,), (),
                            f"Problem generation failed during {error.stage}: "
                            f"the response could not be interpreted.",
                            origin="task-planner")


def _inject_reach_facts(problem_text: str, scene: SceneModel, domain) -> str:
    """Append statically derivable CanNotReach facts to a revised problem."""
    try:
        problem = parse_problem(problem_text, domain)
    except PddlParseError:
        return problem_text
    known = {o.lower() for o in problem.objects}
    extra = [f for f in reachability_facts(scene)
             if all(a.lower() in known for a in f.args)]
    if not extra:
        return problem_text
    init = list(problem.init)
    have = {a.key for a in init}
    for fact in extra:
        if fact.key not in have:
            init.append(fact)
            have.add(fact.key)
    return assemble_problem_text(problem.name, list(problem.objects), init,
                                 list(problem.goal),
                                 domain_name=problem.domain_name)


def run_trial(instance: "TaskInstance", config: OrchestratorConfig,
              model: ChatModel,
              icl_pool: list[IclExample] | None = None,
              trial_index: int = 0) -> TrialRecord:
    """One closed-loop trial; every failure is a recorded outcome."""
    if config.pipeline == "baseline":
        return _run_baseline_trial(instance, config, model, icl_pool,
                                   trial_index)
    return _run_problem_trial(instance, config, model, icl_pool,
                              trial_index)


def _pick_icl(config: OrchestratorConfig, icl_pool, trial_seed: int
              ) -> IclExample | None:
    if config.gen.icl_examples == 0 or not icl_pool:
        return None
    rng = random.Random(trial_seed ^ 0x1C1)
    return rng.choice(list(icl_pool))


def _run_problem_trial(instance, config, model, icl_pool,
                       trial_index) -> TrialRecord:
    domain = instance.knowledge.domain
    trial_seed = derive_trial_seed(instance.kind, instance.instance_id,
                                   trial_index, config.seed)
    icl = _pick_icl(config, icl_pool, trial_seed)
    transcripts: list[tuple[str, str]] = []
    history = CorrectionHistory()
    timings = {"generation": 0.0, "planning": 0.0}

    t0 = time.perf_counter()
    try:
        spec = generate_spec(instance.instruction, instance.observation,
                             instance.knowledge, model, config.gen,
                             init_icl=icl, goal_icl=icl,
                             name=instance.instance_id)
        current_text = spec.problem_text
        generated_objects = list(spec.objects)
        gen_error = None
        transcripts.extend(spec.transcripts)
    except GenerationError as err:
        current_text = err.problem_text or err.raw_text or "(unparseable)"
        generated_objects = []
        gen_error = err
    timings["generation"] += time.perf_counter() - t0

    initial_text = current_text
    syntax_ok: bool | None = None
    plan_ok: bool | None = None
    outcome_solution: TampSolution | None = None
    failure_phase: str | None = None
    last_feedback: PlanningFeedback | None = None
    attempts = {"task": 0, "motion": 0, "cp": 0}

    for round_index in range(config.n_cp_max + 1):
        feedback: PlanningFeedback | None = None
        if round_index == 0 and gen_error is not None:
            feedback = generation_feedback(gen_error)
            failure_phase = "generation"
            if syntax_ok is None:
                syntax_ok = False
                plan_ok = False
        else:
            report = validate_syntax("", current_text, domain=domain)
            if round_index == 0:
                syntax_ok = report.ok
            if not report.ok:
                feedback = syntax_feedback(report.diagnostics)
                failure_phase = "syntax"
                if round_index == 0:
                    plan_ok = False
            else:
                problem = parse_problem(current_text, domain)
                t1 = time.perf_counter()
                result = solve(domain, problem, instance.scene,
                               config.search, config.motion, seed=trial_seed)
                timings["planning"] += time.perf_counter() - t1
                attempts["task"] += result.attempts[0]
                attempts["motion"] += result.attempts[1]
                if round_index == 0:
                    # a skeleton was found iff the failure is not task-side
                    plan_ok = (isinstance(result, TampSolution)
                               or result.phase == "motion")
                if isinstance(result, TampSolution):
                    outcome_solution = result
                    failure_phase = None
                    break
                feedback = result.feedback
                failure_phase = result.phase

        last_feedback = feedback
        if round_index == config.n_cp_max:
            break

        # one corrective-planning round
        pairs = [] if config.strict_history else _prompt_pairs(
            initial_text, history)
        t2 = time.perf_counter()
        try:
            revision = revise_problem(current_text, feedback, pairs,
                                      instance.instruction,
                                      instance.knowledge, model, config.gen,
                                      feedback_parts=config.feedback_parts,
                                      name=instance.instance_id)
            revised_text = revision.problem_text
            transcripts.extend(revision.transcripts)
            if config.auto_facts:
                revised_text = _inject_reach_facts(revised_text,
                                                   instance.scene, domain)
        except GenerationError as err:
            revised_text = err.raw_text or "(unparseable revision)"
        timings["generation"] += time.perf_counter() - t2
        history.append(revised_text, feedback)
        attempts["cp"] += 1
        current_text = revised_text
        gen_error = None

    final_state: list[str] = []
    if outcome_solution is not None:
        problem = parse_problem(current_text, domain)
        task = ground(domain, problem)
        state, _scene = execute_stub(outcome_solution, task, instance.scene)
        final_state = sorted(a.render() for a in task.state_atoms(state))

    timings["total"] = sum(timings.values())
    return TrialRecord(
        task_id=instance.kind, problem_id=instance.instance_id,
        trial_index=trial_index, seed=trial_seed,
        pipeline=config.pipeline, initial_problem=initial_text,
        history=history,
        outcome="success" if outcome_solution else "failure",
        failure_phase=None if outcome_solution else failure_phase,
        solution=outcome_solution, attempts=attempts,
        transcripts=transcripts, generated_objects=generated_objects,
        final_state=final_state, syntax_ok=syntax_ok, plan_ok=plan_ok,
        terminal_feedback=None if outcome_solution else last_feedback,
        timings=timings)


def _prompt_pairs(initial_text: str, history: CorrectionHistory):
    """Prior (failed problem, its feedback) pairs for the CP prompt, oldest
    first. The currently failing pair is appended by revise_problem itself.

    At revision k the failed texts are the initial problem and the first
    k-1 revisions; history.feedbacks holds exactly their k feedbacks minus
    the current one still in flight.
    """
    if not history.problems:
        return []
    failed_texts = [initial_text] + list(history.problems[:-1])
    return list(zip(failed_texts, history.feedbacks))


def _plan_json(steps: list[str]) -> str:
    return "[" + ", ".join(f'"{s}"' for s in steps) + "]" if steps else "(no plan)"


def _run_baseline_trial(instance, config, model, icl_pool,
                        trial_index) -> TrialRecord:
    domain = instance.knowledge.domain
    trial_seed = derive_trial_seed(instance.kind, instance.instance_id,
                                   trial_index, config.seed)
    transcripts: list[tuple[str, str]] = []
    history = CorrectionHistory()
    timings = {"generation": 0.0, "planning": 0.0}

    # the baseline is validated against the scene's true state: gold objects
    # and init with an empty goal (goal achievement is judged by the bench)
    validation_problem = Problem(instance.gold_problem.name,
                                 instance.gold_problem.domain_name,
                                 instance.gold_problem.objects,
                                 instance.gold_problem.init, ())
    task = ground(domain, validation_problem, prune=False)
    objects = list(validation_problem.objects)

    t0 = time.perf_counter()
    current_steps: list[str] = []
    try:
        current_steps = baseline_generate_plan(
            instance.instruction, instance.observation, instance.knowledge,
            objects, model, config.gen, transcripts)
        gen_feedback = None
    except BaselinePlanError as err:
        gen_feedback = PlanningFeedback(
            (str(err),), (),
            f"The generated action sequence could not be parsed: {err}.",
            origin="task-planner")
    timings["generation"] += time.perf_counter() - t0

    initial_text = _plan_json(current_steps)
    generated_objects = sorted({a for s in current_steps
                                for a in _step_args(s)})
    outcome_solution: TampSolution | None = None
    failure_phase: str | None = None
    attempts = {"task": 0, "motion": 0, "cp": 0}

    last_feedback = None
    for round_index in range(config.n_cp_max + 1):
        if gen_feedback is not None:
            feedback = gen_feedback
            failure_phase = "generation"
        else:
            t1 = time.perf_counter()
            feedback, outcome_solution = _validate_baseline_plan(
                task, current_steps, instance.scene, config, trial_seed,
                attempts)
            timings["planning"] += time.perf_counter() - t1
            if outcome_solution is not None:
                failure_phase = None
                break
            failure_phase = ("motion" if feedback.origin == "motion-planner"
                             else "task")
        last_feedback = feedback
        if round_index == config.n_cp_max:
            break

        pairs = [] if config.strict_history else _prompt_pairs(initial_text,
                                                               history)
        t2 = time.perf_counter()
        try:
            revised = baseline_revise_plan(
                current_steps, feedback, pairs, instance.instruction,
                instance.observation, instance.knowledge, objects, model,
                config.gen, feedback_parts=config.feedback_parts,
                transcripts=transcripts)
            gen_feedback = None
            current_steps = revised
            generated_objects = sorted(set(generated_objects)
                                       | {a for s in revised
                                          for a in _step_args(s)})
        except BaselinePlanError as err:
            gen_feedback = PlanningFeedback(
                (str(err),), (),
                f"The revised action sequence could not be parsed: {err}.",
                origin="task-planner")
            current_steps = []
        timings["generation"] += time.perf_counter() - t2
        history.append(_plan_json(current_steps), feedback)
        attempts["cp"] += 1

    final_state: list[str] = []
    if outcome_solution is not None:
        state, _scene = execute_stub(outcome_solution, task, instance.scene)
        final_state = sorted(a.render() for a in task.state_atoms(state))

    timings["total"] = sum(timings.values())
    return TrialRecord(
        task_id=instance.kind, problem_id=instance.instance_id,
        trial_index=trial_index, seed=trial_seed,
        pipeline=config.pipeline, initial_problem=initial_text,
        history=history,
        outcome="success" if outcome_solution else "failure",
        failure_phase=None if outcome_solution else failure_phase,
        solution=outcome_solution, attempts=attempts,
        transcripts=transcripts, generated_objects=generated_objects,
        final_state=final_state, syntax_ok=None, plan_ok=None,
        terminal_feedback=None if outcome_solution else last_feedback,
        timings=timings)


def _step_args(step: str) -> list[str]:
    _, _, rest = step.partition("(")
    return [a.strip() for a in rest.rstrip(")").split(",") if a.strip()]


def _validate_baseline_plan(task, steps: list[str], scene: SceneModel,
                            config: OrchestratorConfig, seed: int,
                            attempts: dict):
    """simulate + satisfy for a directly generated action sequence."""
    actions = []
    for step in steps:
        name, _, rest = step.partition("(")
        args = tuple(a.strip() for a in rest.rstrip(")").split(",") if a.strip())
        ga = task.find_action(name, args)
        if ga is None:
            fb = PlanningFeedback(
                (f"step {step} is not instantiable in this problem",), (),
                f"The plan step {step} cannot be executed: its arguments do "
                f"not satisfy the action's type requirements.",
                origin="task-planner")
            return fb, None
        actions.append(ga)
    skeleton = PlanSkeleton(tuple(actions))
    attempts["task"] += 1
    report = simulate(task, skeleton)
    if report.failed_step is not None:
        step = skeleton.steps[report.failed_step]
        unmet = ", ".join(l.render() for l in report.unmet)
        fb = PlanningFeedback(
            tuple(f"unmet precondition {l.render()} at step "
                  f"{report.failed_step} ({step.signature})"
                  for l in report.unmet), (),
            f"The plan fails at step {report.failed_step} "
            f"({step.signature}): preconditions not satisfied: {unmet}.",
            origin="task-planner")
        return fb, None
    pipeline = compile_stages(skeleton, scene, config.motion)
    outcome = satisfy(pipeline, scene, attempts=config.motion.attempts,
                      seed=seed, config=config.motion)
    attempts["motion"] += 1
    if isinstance(outcome, MotionSolution):
        return None, TampSolution(skeleton, outcome, (0, 1))
    return synthesize_feedback(outcome, pipeline), None


def execute_stub(solution: TampSolution, task, scene: SceneModel
                 ) -> tuple[int, SceneModel]:
    """No-op execution: replay the symbolic plan and mirror object moves.

    Objects snap to the center of the location they end At (or Served at);
    everything else keeps its pose.
    """
    report = simulate(task, solution.skeleton)
    state = report.final_state
    new_scene = scene
    for i, atom in enumerate(task.facts):
        if not state >> i & 1:
            continue
        pred = atom.predicate.lower()
        if pred in ("at", "served") and len(atom.args) == 2:
            obj, loc = atom.args
            if obj in new_scene.objects and loc in new_scene.locations:
                new_scene = new_scene.moved(
                    obj, new_scene.locations[loc].center)
    return state, new_scene
