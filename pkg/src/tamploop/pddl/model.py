"""Core value types for the STRIPS + equality + negative-preconditions PDDL subset.

Identifiers are case-preserving but compared case-insensitively (PDDL
convention); hyphens and underscores are distinct characters.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


def canon(name: str) -> str:
    """Canonical (lowercase) form of an identifier, used for all lookups."""
    return name.lower()


@dataclass(frozen=True)
class Atom:
    """A predicate applied to terms (variables or constants)."""

    predicate: str
    args: tuple[str, ...]

    def render(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"

    @property
    def key(self) -> tuple:
        return (canon(self.predicate), tuple(canon(a) for a in self.args))

    def substitute(self, binding: dict[str, str]) -> "Atom":
        return Atom(self.predicate, tuple(binding.get(a, a) for a in self.args))

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Literal:
    """A signed atom. Equality atoms use the reserved predicate name "="."""

    atom: Atom
    negated: bool = False

    def render(self) -> str:
        return f"(not {self.atom.render()})" if self.negated else self.atom.render()

    @property
    def is_equality(self) -> bool:
        return self.atom.predicate == "="

    def substitute(self, binding: dict[str, str]) -> "Literal":
        return Literal(self.atom.substitute(binding), self.negated)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    parameters: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.parameters)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: tuple[str, ...]
    precondition: tuple[Literal, ...]
    effect: tuple[Literal, ...]

    @property
    def add_effects(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.effect if not l.negated)

    @property
    def del_effects(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.effect if l.negated)


@dataclass(frozen=True)
class Domain:
    name: str
    requirements: tuple[str, ...]
    predicates: tuple[PredicateSchema, ...]
    actions: tuple[ActionSchema, ...]
    descriptions: dict = field(default_factory=dict, compare=False)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def predicate(self, name: str) -> PredicateSchema | None:
        return {canon(p.name): p for p in self.predicates}.get(canon(name))

    def action(self, name: str) -> ActionSchema | None:
        return {canon(a.name): a for a in self.actions}.get(canon(name))

    def static_predicates(self) -> set[str]:
        """Canonical names of predicates never touched by any effect."""
        touched = {canon(l.atom.predicate) for a in self.actions for l in a.effect}
        return {canon(p.name) for p in self.predicates} - touched


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    objects: tuple[str, ...]
    init: tuple[Atom, ...]
    goal: tuple[Literal, ...]

    def __post_init__(self):
        # init is a set and goal a conjunction: store both in render order so
        # structural equality ignores source ordering
        object.__setattr__(self, "init", tuple(sorted(self.init, key=lambda a: a.render())))
        object.__setattr__(self, "goal", tuple(sorted(self.goal, key=lambda l: l.render())))

    def init_keys(self) -> set[tuple]:
        return {a.key for a in self.init}


class DescriptionsError(ValueError):
    pass


def load_descriptions(path: str | Path, domain: Domain) -> dict:
    """Load the sidecar {"predicates": {...}, "actions": {...}} JSON map.

    Every predicate and action of the domain must be covered; the map fills
    the natural-language slots of the generation prompts.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    preds = {canon(k): v for k, v in data.get("predicates", {}).items()}
    acts = {canon(k): v for k, v in data.get("actions", {}).items()}
    missing = [p.name for p in domain.predicates if canon(p.name) not in preds]
    missing += [a.name for a in domain.actions if canon(a.name) not in acts]
    if missing:
        raise DescriptionsError(f"descriptions missing entries for: {', '.join(missing)}")
    return {"predicates": data.get("predicates", {}), "actions": data.get("actions", {})}
