"""Instantiation of action schemas over problem objects.

Produces an indexed fact universe and bitmask-encoded ground actions.
Equality atoms are resolved statically and never appear in the ground task.
Bindings violating static preconditions (predicates no effect ever touches,
e.g. type predicates and CanNotReach) are dropped during enumeration; optional
delete-relaxation reachability pruning removes actions that can never fire.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .model import Atom, Domain, Literal, Problem, canon


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pos_pre: frozenset[int]
    neg_pre: frozenset[int]
    add: frozenset[int]
    delete: frozenset[int]
    pos_mask: int = field(compare=False, default=0)
    neg_mask: int = field(compare=False, default=0)
    add_mask: int = field(compare=False, default=0)
    del_mask: int = field(compare=False, default=0)

    @property
    def signature(self) -> str:
        return f"{self.name}({', '.join(self.args)})"

    @property
    def key(self) -> tuple:
        return (canon(self.name), tuple(canon(a) for a in self.args))

    def applicable(self, state: int) -> bool:
        return (state & self.pos_mask) == self.pos_mask and (state & self.neg_mask) == 0

    def apply(self, state: int) -> int:
        # deletes before adds, standard STRIPS step semantics
        return (state & ~self.del_mask) | self.add_mask

    def __str__(self) -> str:
        return self.signature


@dataclass(frozen=True)
class GroundTask:
    domain: Domain
    problem: Problem
    facts: tuple[Atom, ...]
    init_state: int
    goal_pos: frozenset[int]
    goal_neg: frozenset[int]
    actions: tuple[GroundAction, ...]

    def fact_index(self, atom: Atom) -> int | None:
        return self._index.get(atom.key)

    @property
    def _index(self) -> dict:
        idx = getattr(self, "_index_cache", None)
        if idx is None:
            idx = {a.key: i for i, a in enumerate(self.facts)}
            object.__setattr__(self, "_index_cache", idx)
        return idx

    def find_action(self, name: str, args: tuple[str, ...]) -> GroundAction | None:
        table = getattr(self, "_action_cache", None)
        if table is None:
            table = {a.key: a for a in self.actions}
            object.__setattr__(self, "_action_cache", table)
        return table.get((canon(name), tuple(canon(a) for a in args)))

    def state_atoms(self, state: int) -> list[Atom]:
        return [a for i, a in enumerate(self.facts) if state >> i & 1]

    def goal_holds(self, state: int) -> bool:
        return (all(state >> i & 1 for i in self.goal_pos)
                and not any(state >> i & 1 for i in self.goal_neg))


class GroundingError(ValueError):
    pass


def _mask(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def _candidate_values(action, static_preds: set[str], init_keys: set[tuple],
                      objects: tuple[str, ...]) -> list[list[str]]:
    """Per-parameter candidate objects, narrowed by unary static positives."""
    by_param: dict[str, list[str]] = {canon(p): list(objects) for p in action.parameters}
    for lit in action.precondition:
        if lit.negated or lit.is_equality:
            continue
        if canon(lit.atom.predicate) not in static_preds or len(lit.atom.args) != 1:
            continue
        arg = lit.atom.args[0]
        if not arg.startswith("?"):
            continue
        allowed = [o for o in objects
                   if (canon(lit.atom.predicate), (canon(o),)) in init_keys]
        prev = by_param[canon(arg)]
        by_param[canon(arg)] = [o for o in prev if o in allowed]
    return [by_param[canon(p)] for p in action.parameters]


def enumerate_ground_actions(domain: Domain, problem: Problem) -> list[tuple]:
    """All statically consistent bindings as (schema, binding, literal lists).

    A binding is dropped when an equality test fails or a static precondition
    is falsified by the initial state (statics never change, so such actions
    could never fire).
    """
    static_preds = domain.static_predicates()
    init_keys = problem.init_keys()
    out = []
    for action in domain.actions:
        columns = _candidate_values(action, static_preds, init_keys, problem.objects)
        for combo in product(*columns):
            binding = {p: v for p, v in zip(action.parameters, combo)}
            binding.update({canon(p): v for p, v in zip(action.parameters, combo)})
            ok = True
            pre: list[Literal] = []
            for lit in action.precondition:
                ground = lit.substitute(binding)
                if ground.is_equality:
                    a, b = (canon(t) for t in ground.atom.args)
                    if (a == b) == ground.negated:
                        ok = False
                        break
                    continue
                if canon(ground.atom.predicate) in static_preds:
                    holds = ground.atom.key in init_keys
                    if holds == ground.negated:
                        ok = False
                        break
                pre.append(ground)
            if not ok:
                continue
            eff = [lit.substitute(binding) for lit in action.effect]
            out.append((action, combo, pre, eff))
    out.sort(key=lambda item: (canon(item[0].name), tuple(canon(a) for a in item[1])))
    return out


def ground(domain: Domain, problem: Problem, prune: bool = True) -> GroundTask:
    """Ground a problem into an indexed task.

    With prune=True (default), actions whose positive preconditions are not
    reachable under delete relaxation are removed; the fact universe keeps
    only atoms mentioned by the surviving actions, the init, and the goal.
    """
    entries = enumerate_ground_actions(domain, problem)

    atoms: dict[tuple, Atom] = {}

    def intern(atom: Atom) -> None:
        atoms.setdefault(atom.key, atom)

    for a in problem.init:
        intern(a)
    for l in problem.goal:
        intern(l.atom)
    for _, _, pre, eff in entries:
        for l in pre:
            intern(l.atom)
        for l in eff:
            intern(l.atom)

    facts = tuple(sorted(atoms.values(), key=lambda a: a.render()))
    index = {a.key: i for i, a in enumerate(facts)}

    ground_actions: list[GroundAction] = []
    for action, combo, pre, eff in entries:
        pos = frozenset(index[l.atom.key] for l in pre if not l.negated)
        neg = frozenset(index[l.atom.key] for l in pre if l.negated)
        add = frozenset(index[l.atom.key] for l in eff if not l.negated)
        dele = frozenset(index[l.atom.key] for l in eff if l.negated)
        ground_actions.append(GroundAction(
            action.name, tuple(combo), pos, neg, add, dele,
            pos_mask=_mask(pos), neg_mask=_mask(neg),
            add_mask=_mask(add), del_mask=_mask(dele)))

    init_state = _mask(index[a.key] for a in problem.init)
    if prune:
        reachable = relaxed_reachable_facts(init_state, ground_actions)
        ground_actions = [ga for ga in ground_actions
                          if (reachable & ga.pos_mask) == ga.pos_mask]

    goal_pos = frozenset(index[l.atom.key] for l in problem.goal if not l.negated)
    goal_neg = frozenset(index[l.atom.key] for l in problem.goal if l.negated)
    return GroundTask(domain, problem, facts, init_state, goal_pos, goal_neg,
                      tuple(ground_actions))


def relaxed_reachable_facts(init_state: int, actions: list[GroundAction]) -> int:
    """Fixpoint of fact reachability ignoring deletes and negative tests."""
    reached = init_state
    pending = list(actions)
    changed = True
    while changed:
        changed = False
        rest = []
        for ga in pending:
            if (reached & ga.pos_mask) == ga.pos_mask:
                new = reached | ga.add_mask
                if new != reached:
                    reached = new
                    changed = True
            else:
                rest.append(ga)
                continue
        pending = rest
    return reached
