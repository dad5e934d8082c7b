"""VAL-style checking: syntax reports, step execution, and goal matching."""
from __future__ import annotations

from dataclasses import dataclass, field

from .pddl import PddlParseError, parse_domain, parse_problem
from .pddl.ground import GroundTask
from .pddl.model import Domain, Literal
from .search import PlanSkeleton


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    location: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class SyntaxReport:
    ok: bool
    diagnostics: tuple[Diagnostic, ...] = ()

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    def to_dict(self) -> dict:
        return {"ok": self.ok,
                "diagnostics": [[d.severity, d.message, list(d.location)]
                                for d in self.diagnostics]}


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    failed_step: int | None
    unmet: tuple[Literal, ...]
    final_state: int

    def to_dict(self, task: GroundTask | None = None) -> dict:
        data = {"valid": self.valid, "failed_step": self.failed_step,
                "unmet": [l.render() for l in self.unmet]}
        if task is not None:
            data["final_state"] = sorted(a.render()
                                         for a in task.state_atoms(self.final_state))
        return data


def validate_syntax(domain_text: str, problem_text: str,
                    domain: Domain | None = None) -> SyntaxReport:
    """Total check: parse both texts and enforce every problem invariant.

    Errors come back as diagnostics, never as exceptions. A pre-parsed domain
    may be supplied to skip re-parsing the domain text.
    """
    diagnostics: list[Diagnostic] = []
    if domain is None:
        try:
            domain = parse_domain(domain_text)
        except PddlParseError as err:
            diagnostics.append(Diagnostic("error", err.message, (err.line, err.column)))
            return SyntaxReport(False, tuple(diagnostics))
        except Exception as err:  # malformed beyond recognition stays a report
            diagnostics.append(Diagnostic("error", str(err)))
            return SyntaxReport(False, tuple(diagnostics))
    for warning in domain.warnings:
        diagnostics.append(Diagnostic("warning", warning))
    try:
        parse_problem(problem_text, domain)
    except PddlParseError as err:
        diagnostics.append(Diagnostic("error", err.message, (err.line, err.column)))
    except Exception as err:
        diagnostics.append(Diagnostic("error", str(err)))
    ok = not any(d.severity == "error" for d in diagnostics)
    return SyntaxReport(ok, tuple(diagnostics))


class UnknownActionError(ValueError):
    pass


def simulate(task: GroundTask, skeleton: PlanSkeleton) -> ValidationReport:
    """Apply the skeleton step by step (deletes before adds within a step).

    Stops at the first step whose preconditions fail, recording every unmet
    literal; otherwise checks the task goal in the final state.
    """
    known = {a.key for a in task.actions}
    state = task.init_state
    for index, action in enumerate(skeleton.steps):
        if action.key not in known:
            raise UnknownActionError(f"step {index} references unknown action "
                                     f"{action.signature}")
        if not action.applicable(state):
            unmet: list[Literal] = []
            for f in sorted(action.pos_pre):
                if not state >> f & 1:
                    unmet.append(Literal(task.facts[f]))
            for f in sorted(action.neg_pre):
                if state >> f & 1:
                    unmet.append(Literal(task.facts[f], negated=True))
            return ValidationReport(False, index, tuple(unmet), state)
        state = action.apply(state)
    if task.goal_holds(state):
        return ValidationReport(True, None, (), state)
    unmet_goal = []
    for f in sorted(task.goal_pos):
        if not state >> f & 1:
            unmet_goal.append(Literal(task.facts[f]))
    for f in sorted(task.goal_neg):
        if state >> f & 1:
            unmet_goal.append(Literal(task.facts[f], negated=True))
    return ValidationReport(False, None, tuple(unmet_goal), state)


def check_goal_match(task: GroundTask, final_state: int,
                     gold_goal: tuple[Literal, ...]) -> bool:
    """True iff every gold signed literal holds in the final state."""
    for lit in gold_goal:
        idx = task.fact_index(lit.atom)
        holds = idx is not None and bool(final_state >> idx & 1)
        if holds == lit.negated:
            return False
    return True
