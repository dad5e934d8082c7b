"""Integrated sequence-before-satisfy planner.

Searches for a symbolic skeleton, compiles it to a stage pipeline and samples
motions; on motion failure it cycles to the next distinct skeleton up to the
skeleton budget and keeps the most informed (last) feedback.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .geometry import (
    MotionConfig,
    MotionFailure,
    MotionSolution,
    PlanningFeedback,
    SceneModel,
    compile_stages,
    satisfy,
    synthesize_feedback,
)
from .pddl.ground import GroundTask, ground, relaxed_reachable_facts
from .pddl.model import Domain, Problem
from .search import (
    BudgetExhausted,
    Exhausted,
    PlanSkeleton,
    SearchConfig,
    Unsolvable,
    next_skeleton,
    plan,
)
from .validate import simulate


@dataclass(frozen=True)
class TampSolution:
    skeleton: PlanSkeleton
    motion: MotionSolution
    attempts: tuple[int, int]  # (task planning calls, motion planning calls)

    def to_dict(self) -> dict:
        return {"skeleton": self.skeleton.signatures(),
                "motion": self.motion.to_dict(),
                "attempts": {"task": self.attempts[0], "motion": self.attempts[1]}}


@dataclass(frozen=True)
class TampFailure:
    feedback: PlanningFeedback
    attempts: tuple[int, int]
    phase: str  # "task" | "motion"

    def __post_init__(self):
        origin = {"task": "task-planner", "motion": "motion-planner"}[self.phase]
        if self.feedback.origin != origin:
            raise ValueError("failure phase inconsistent with feedback origin")

    def to_dict(self) -> dict:
        return {"phase": self.phase,
                "feedback": self.feedback.to_dict(),
                "attempts": {"task": self.attempts[0], "motion": self.attempts[1]}}


def solve(domain: Domain, problem: Problem, scene: SceneModel,
          search_config: SearchConfig = SearchConfig(),
          motion_config: MotionConfig = MotionConfig(),
          seed: int = 0) -> TampSolution | TampFailure:
    """Plan symbolically, then satisfy geometrically, cycling skeletons.

    The caller is responsible for syntax validation; grounding an invalid
    problem raises. Attempt counters mirror the number of plan/next_skeleton
    and satisfy calls.
    """
    task = ground(domain, problem)
    task_attempts = 0
    motion_attempts = 0

    first = plan(task, search_config)
    task_attempts += 1
    if isinstance(first, (Unsolvable, BudgetExhausted)):
        feedback = task_failure_feedback(first, task)
        return TampFailure(feedback, (task_attempts, motion_attempts), "task")

    skeleton = first
    exclusions: list[PlanSkeleton] = []
    last_feedback: PlanningFeedback | None = None

    while True:
        check = simulate(task, skeleton)
        if not check.valid:
            raise AssertionError(
                f"planner emitted an invalid skeleton: {skeleton}")
        pipeline = compile_stages(skeleton, scene, motion_config)
        outcome = satisfy(pipeline, scene, attempts=motion_config.attempts,
                          seed=seed, config=motion_config)
        motion_attempts += 1
        if isinstance(outcome, MotionSolution):
            return TampSolution(skeleton, outcome,
                                (task_attempts, motion_attempts))
        last_feedback = synthesize_feedback(outcome, pipeline)
        exclusions.append(skeleton)
        nxt = next_skeleton(task, search_config, exclusions)
        task_attempts += 1
        if isinstance(nxt, Exhausted):
            return TampFailure(last_feedback,
                               (task_attempts, motion_attempts), "motion")
        skeleton = nxt


def task_failure_feedback(outcome: Unsolvable | BudgetExhausted,
                          task: GroundTask) -> PlanningFeedback:
    """Explain a failed symbolic search.

    For exhausted searches the goal literals are analyzed against the set of
    reachable states: individually unreachable literals, init facts that
    contradict goal negations, and pairs of literals never simultaneously
    achievable are each reported. Budget exhaustion reports the budget only.
    """
    problem = task.problem
    goal_strings = [l.render() for l in problem.goal]

    if isinstance(outcome, BudgetExhausted):
        message = (f"Task planning stopped after expanding "
                   f"{outcome.node_budget} search nodes without finding a "
                   f"plan for the goal {' '.join(goal_strings)}. The node "
                   f"budget was exhausted; the goal may still be achievable.")
        comments = (f"node budget {outcome.node_budget} exhausted",)
        return PlanningFeedback(comments, (), message, origin="task-planner")

    comments: list[str] = []
    reachable = relaxed_reachable_facts(task.init_state, list(task.actions))

    unreachable: list[str] = []
    for idx in sorted(task.goal_pos):
        if not reachable >> idx & 1:
            lit = task.facts[idx].render()
            unreachable.append(lit)
            comments.append(f"goal literal {lit} is unreachable: no sequence "
                            f"of actions can ever achieve it")

    contradictions: list[str] = []
    deletable = set()
    for action in task.actions:
        deletable.update(action.delete)
    for idx in sorted(task.goal_neg):
        lit = task.facts[idx].render()
        if task.init_state >> idx & 1 and idx not in deletable:
            contradictions.append(lit)
            comments.append(f"goal requires (not {lit}) but {lit} holds in "
                            f"the initial state and no action deletes it")

    joint: list[tuple[str, str]] = []
    if not unreachable and not contradictions:
        states = _reachable_states(task, cap=200_000)
        never = []
        for idx in sorted(task.goal_pos):
            if not any(s >> idx & 1 for s in states):
                lit = task.facts[idx].render()
                never.append(lit)
                comments.append(f"goal literal {lit} never holds in any "
                                f"reachable state")
        if not never:
            for i, j in combinations(sorted(task.goal_pos), 2):
                if not any(s >> i & 1 and s >> j & 1 for s in states):
                    pair = (task.facts[i].render(), task.facts[j].render())
                    joint.append(pair)
                    comments.append(
                        f"goal literals {pair[0]} and {pair[1]} are jointly "
                        f"unachievable: no action establishes both and no "
                        f"reachable state satisfies them simultaneously")
        unreachable.extend(never)

    if not comments:
        comments.append("the goal conjunction is unsatisfiable from the "
                        "given initial state")
    message = ("Task planning failed: the goal "
               + " ".join(goal_strings)
               + " cannot be satisfied from the initial state. "
               + " ".join(c.capitalize() + "." for c in comments))
    return PlanningFeedback(tuple(comments), (), message, origin="task-planner")


def _reachable_states(task: GroundTask, cap: int) -> list[int]:
    seen = {task.init_state}
    frontier = [task.init_state]
    while frontier and len(seen) < cap:
        state = frontier.pop()
        for action in task.actions:
            if action.applicable(state):
                nxt = action.apply(state)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
    return sorted(seen)
