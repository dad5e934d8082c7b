"""Canonical, deterministic serialization of domains and problems.

Init atoms and goal literals are sorted bytewise on their rendered text so
that rendered problems are reproducible in prompts and logs.
"""
from __future__ import annotations

from .model import ActionSchema, Domain, Problem


def render_problem(problem: Problem) -> str:
    init_lines = sorted(a.render() for a in problem.init)
    goal_lines = sorted(l.render() for l in problem.goal)
    parts = [f"(define (problem {problem.name})"]
    parts.append(f"    (:domain {problem.domain_name})")
    parts.append(f"    (:objects {' '.join(problem.objects)})")
    if init_lines:
        parts.append("    (:init")
        parts.extend(f"        {line}" for line in init_lines)
        parts.append("    )")
    else:
        parts.append("    (:init)")
    if goal_lines:
        parts.append("    (:goal (and")
        parts.extend(f"        {line}" for line in goal_lines)
        parts.append("    ))")
    else:
        parts.append("    (:goal (and))")
    parts.append(")")
    return "\n".join(parts) + "\n"


def render_init_block(problem: Problem) -> str:
    """One-line (:init ...) block, sorted, as used in prompt slots."""
    return "(:init " + " ".join(sorted(a.render() for a in problem.init)) + ")"


def render_goal_block(problem: Problem) -> str:
    """One-line (:goal (and ...)) block, sorted, as used in prompt slots."""
    inner = " ".join(sorted(l.render() for l in problem.goal))
    return f"(:goal (and {inner}))" if inner else "(:goal (and))"


def _render_action(action: ActionSchema) -> list[str]:
    lines = [f"    (:action {action.name}"]
    lines.append(f"        :parameters ({' '.join(action.parameters)})")
    lines.append("        :precondition (and")
    lines.extend(f"            {l.render()}" for l in action.precondition)
    lines.append("        )")
    lines.append("        :effect (and")
    lines.extend(f"            {l.render()}" for l in action.effect)
    lines.append("        )")
    lines.append("    )")
    return lines


def render_domain(domain: Domain) -> str:
    lines = [f"(define (domain {domain.name})"]
    if domain.requirements:
        lines.append(f"    (:requirements {' '.join(domain.requirements)})")
    lines.append("    (:predicates")
    for pred in domain.predicates:
        lines.append(f"        ({pred.name} {' '.join(pred.parameters)})"
                     if pred.parameters else f"        ({pred.name})")
    lines.append("    )")
    for action in domain.actions:
        lines.append("")
        lines.extend(_render_action(action))
    lines.append(")")
    return "\n".join(lines) + "\n"


def render_predicate_definitions(domain: Domain) -> str:
    """Predicate signatures with their descriptions, one per line.

    Fills the "{predicates}" prompt slot in the style of the domain file's
    inline comments.
    """
    lines = []
    desc = {k.lower(): v for k, v in domain.descriptions.get("predicates", {}).items()}
    for pred in domain.predicates:
        sig = f"({pred.name} {' '.join(pred.parameters)})" if pred.parameters else f"({pred.name})"
        note = desc.get(pred.name.lower())
        lines.append(f"{sig} ; {note}" if note else sig)
    return "\n".join(lines)


def render_action_definitions(domain: Domain) -> str:
    """Full action definitions with description headers for "{actions}"."""
    blocks = []
    desc = {k.lower(): v for k, v in domain.descriptions.get("actions", {}).items()}
    for action in domain.actions:
        lines = []
        note = desc.get(action.name.lower())
        if note:
            lines.append(f"; {action.name.upper()}: {note}")
        lines.extend(l[4:] if l.startswith("    ") else l for l in _render_action(action))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)
