"""Recursive-descent parser for PDDL domains and problems.

Supports the subset exercised by the cooking domain: :strips, :equality and
(unconditionally, with a warning when the flag is absent) negative
preconditions. Types are plain unary predicates; there is no :typing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .model import ActionSchema, Atom, Domain, Literal, PredicateSchema, Problem, canon

KNOWN_REQUIREMENTS = {":strips", ":equality", ":negative-preconditions"}

_SYMBOL_RE = re.compile(r"[A-Za-z0-9_\-=][A-Za-z0-9_\-=]*")


class PddlParseError(ValueError):
    """Parse or validation failure, with source position when known."""

    def __init__(self, message: str, line: int = 0, column: int = 0, token: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        where = f" at line {line}, column {column}" if line else ""
        tok = f" (near {token!r})" if token else ""
        super().__init__(f"{message}{where}{tok}")


@dataclass(frozen=True)
class Token:
    kind: str  # "(", ")", "symbol", "variable"
    value: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            tokens.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch == "?":
            m = _SYMBOL_RE.match(text, i + 1)
            if not m:
                raise PddlParseError("dangling '?'", line, col, "?")
            tokens.append(Token("variable", "?" + m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if ch == ":":
            m = _SYMBOL_RE.match(text, i + 1)
            if not m:
                raise PddlParseError("dangling ':'", line, col, ":")
            tokens.append(Token("symbol", ":" + m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _SYMBOL_RE.match(text, i)
        if m:
            tokens.append(Token("symbol", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        raise PddlParseError(f"unexpected character {ch!r}", line, col, ch)
    return tokens


class _Reader:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token("(", "(", 1, 1)
            raise PddlParseError("unbalanced parentheses: unexpected end of input",
                                 last.line, last.column)
        self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.next()
        if tok.kind != kind or (value is not None and canon(tok.value) != canon(value)):
            want = value if value is not None else kind
            raise PddlParseError(f"expected {want!r}", tok.line, tok.column, tok.value)
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)


def _read_list(reader: _Reader) -> list:
    """Read one s-expression list; '(' already consumed. Returns tokens/sublists."""
    items: list = []
    while True:
        tok = reader.peek()
        if tok is None:
            raise PddlParseError("unbalanced parentheses: missing ')'",
                                 reader.tokens[-1].line, reader.tokens[-1].column)
        if tok.kind == ")":
            reader.next()
            return items
        if tok.kind == "(":
            reader.next()
            items.append(_read_list(reader))
        else:
            items.append(reader.next())


def _sexpr(text: str) -> list:
    tokens = tokenize(text)
    reader = _Reader(tokens)
    reader.expect("(")
    tree = _read_list(reader)
    if not reader.at_end():
        extra = reader.peek()
        raise PddlParseError("trailing input after top-level form",
                             extra.line, extra.column, extra.value)
    return tree


def _head(form, expected: str) -> None:
    if not form or not isinstance(form[0], Token) or canon(form[0].value) != expected:
        tok = form[0] if form and isinstance(form[0], Token) else Token("symbol", "?", 0, 0)
        raise PddlParseError(f"expected {expected!r}", tok.line, tok.column, tok.value)


def _atom_from(form: list, *, allow_variables: bool) -> tuple[Atom, Token]:
    if not form or not isinstance(form[0], Token) or form[0].kind != "symbol":
        raise PddlParseError("expected a predicate name",
                             *_pos(form), _tokval(form))
    name_tok = form[0]
    args = []
    for item in form[1:]:
        if not isinstance(item, Token):
            raise PddlParseError("nested form inside atom", name_tok.line, name_tok.column)
        if item.kind == "variable" and not allow_variables:
            raise PddlParseError("variable not allowed here", item.line, item.column, item.value)
        if item.kind not in ("symbol", "variable"):
            raise PddlParseError("expected a term", item.line, item.column, item.value)
        args.append(item.value)
    return Atom(name_tok.value, tuple(args)), name_tok


def _pos(form) -> tuple[int, int]:
    if form and isinstance(form[0], Token):
        return form[0].line, form[0].column
    return 0, 0


def _tokval(form) -> str:
    if form and isinstance(form[0], Token):
        return form[0].value
    return ""


def _literal_from(form: list, *, allow_variables: bool) -> tuple[Literal, Token]:
    if form and isinstance(form[0], Token) and canon(form[0].value) == "not":
        if len(form) != 2 or not isinstance(form[1], list):
            raise PddlParseError("malformed (not ...) form", form[0].line, form[0].column)
        atom, tok = _atom_from(form[1], allow_variables=allow_variables)
        return Literal(atom, negated=True), tok
    atom, tok = _atom_from(form, allow_variables=allow_variables)
    return Literal(atom, negated=False), tok


def _conjunction(form: list, *, allow_variables: bool) -> list[tuple[Literal, Token]]:
    """Parse (and lit*) or a bare literal into a literal list."""
    if form and isinstance(form[0], Token) and canon(form[0].value) == "and":
        out = []
        for sub in form[1:]:
            if not isinstance(sub, list):
                raise PddlParseError("expected a literal", sub.line, sub.column, sub.value)
            out.append(_literal_from(sub, allow_variables=allow_variables))
        return out
    return [_literal_from(form, allow_variables=allow_variables)]


def parse_domain(text: str) -> Domain:
    """Parse a PDDL domain, validating the schema invariants.

    Raises PddlParseError with line/column info on lexical errors, unbalanced
    parentheses, unknown requirements, undeclared predicates, unbound
    variables, duplicate predicates, and malformed effects.
    """
    tree = _sexpr(text)
    _head(tree, "define")
    if len(tree) < 2 or not isinstance(tree[1], list):
        raise PddlParseError("missing (domain NAME)")
    _head(tree[1], "domain")
    if len(tree[1]) != 2 or not isinstance(tree[1][1], Token):
        raise PddlParseError("malformed (domain NAME)", *_pos(tree[1]))
    name = tree[1][1].value

    requirements: list[str] = []
    predicates: list[PredicateSchema] = []
    actions: list[ActionSchema] = []
    warnings: list[str] = []
    seen_preds: dict[str, Token] = {}

    for section in tree[2:]:
        if not isinstance(section, list) or not section or not isinstance(section[0], Token):
            raise PddlParseError("malformed domain section")
        kw = canon(section[0].value)
        if kw == ":requirements":
            for tok in section[1:]:
                if not isinstance(tok, Token):
                    raise PddlParseError("malformed requirement", *_pos(section))
                if canon(tok.value) not in KNOWN_REQUIREMENTS:
                    raise PddlParseError(f"unknown requirement {tok.value}",
                                         tok.line, tok.column, tok.value)
                requirements.append(canon(tok.value))
        elif kw == ":predicates":
            for form in section[1:]:
                if not isinstance(form, list):
                    raise PddlParseError("malformed predicate declaration",
                                         form.line, form.column, form.value)
                atom, tok = _atom_from(form, allow_variables=True)
                for arg in atom.args:
                    if not arg.startswith("?"):
                        raise PddlParseError(
                            f"predicate parameter {arg!r} must be a variable",
                            tok.line, tok.column, arg)
                if canon(atom.predicate) in seen_preds:
                    raise PddlParseError(
                        f"duplicate predicate {atom.predicate} "
                        f"(names are compared case-insensitively)",
                        tok.line, tok.column, atom.predicate)
                seen_preds[canon(atom.predicate)] = PredicateSchema(atom.predicate, atom.args)
                predicates.append(PredicateSchema(atom.predicate, atom.args))
        elif kw == ":action":
            actions.append(_parse_action(section, seen_preds, requirements, warnings))
        else:
            raise PddlParseError(f"unsupported domain section {section[0].value}",
                                 section[0].line, section[0].column, section[0].value)

    seen_actions: set[str] = set()
    for act in actions:
        if canon(act.name) in seen_actions:
            raise PddlParseError(f"duplicate action {act.name}")
        seen_actions.add(canon(act.name))
    return Domain(name, tuple(requirements), tuple(predicates), tuple(actions),
                  warnings=tuple(warnings))


def _parse_action(section: list, declared: dict[str, PredicateSchema],
                  requirements: list[str], warnings: list[str]) -> ActionSchema:
    if len(section) < 2 or not isinstance(section[1], Token):
        raise PddlParseError("missing action name", *_pos(section))
    name_tok = section[1]
    fields: dict[str, object] = {}
    i = 2
    while i < len(section):
        key = section[i]
        if not isinstance(key, Token) or canon(key.value) not in (":parameters", ":precondition", ":effect"):
            raise PddlParseError("expected :parameters, :precondition or :effect",
                                 *((key.line, key.column) if isinstance(key, Token) else (name_tok.line, name_tok.column)))
        if i + 1 >= len(section) or not isinstance(section[i + 1], list):
            raise PddlParseError(f"missing value for {key.value}", key.line, key.column)
        fields[canon(key.value)] = section[i + 1]
        i += 2

    params: list[str] = []
    for tok in fields.get(":parameters", []):
        if not isinstance(tok, Token) or tok.kind != "variable":
            raise PddlParseError("action parameters must be variables",
                                 name_tok.line, name_tok.column)
        params.append(tok.value)
    param_keys = {canon(p) for p in params}

    def check_body(lits: list[tuple[Literal, Token]], *, in_effect: bool) -> list[Literal]:
        out = []
        for lit, tok in lits:
            if lit.is_equality:
                if in_effect:
                    raise PddlParseError("equality atom not allowed in effect",
                                         tok.line, tok.column, "=")
                if len(lit.atom.args) != 2:
                    raise PddlParseError("equality takes exactly two terms",
                                         tok.line, tok.column, "=")
            else:
                schema = declared.get(canon(lit.atom.predicate))
                if schema is None:
                    raise PddlParseError(f"undeclared predicate {lit.atom.predicate}",
                                         tok.line, tok.column, lit.atom.predicate)
                if len(lit.atom.args) != schema.arity:
                    raise PddlParseError(
                        f"arity mismatch for {schema.name}/{schema.arity}: "
                        f"got {len(lit.atom.args)} argument(s)",
                        tok.line, tok.column, lit.atom.predicate)
            if lit.negated and not lit.is_equality and ":negative-preconditions" not in requirements:
                if not in_effect:
                    msg = (f"negative precondition {lit.render()} used without "
                           f":negative-preconditions requirement")
                    if msg not in warnings:
                        warnings.append(msg)
            for arg in lit.atom.args:
                if arg.startswith("?") and canon(arg) not in param_keys:
                    raise PddlParseError(f"unbound variable {arg} in action {name_tok.value}",
                                         tok.line, tok.column, arg)
            out.append(lit)
        return out

    pre = check_body(_conjunction(fields.get(":precondition", []), allow_variables=True),
                     in_effect=False)
    eff = check_body(_conjunction(fields.get(":effect", []), allow_variables=True),
                     in_effect=True)

    adds = {l.atom.key for l in eff if not l.negated}
    dels = {l.atom.key for l in eff if l.negated}
    both = adds & dels
    if both:
        raise PddlParseError(
            f"literal appears both positively and negatively in effect of {name_tok.value}",
            name_tok.line, name_tok.column)
    return ActionSchema(name_tok.value, tuple(params), tuple(pre), tuple(eff))


def _check_ground_atom(atom: Atom, tok: Token, domain: Domain,
                       object_keys: set[str]) -> None:
    schema = domain.predicate(atom.predicate)
    if schema is None:
        raise PddlParseError(f"unknown predicate {atom.predicate}",
                             tok.line, tok.column, atom.predicate)
    if len(atom.args) != schema.arity:
        raise PddlParseError(
            f"arity mismatch for {schema.name}/{schema.arity}: "
            f"got {len(atom.args)} argument(s)",
            tok.line, tok.column, atom.predicate)
    for arg in atom.args:
        if arg.startswith("?"):
            raise PddlParseError(f"variable {arg} not allowed in a problem",
                                 tok.line, tok.column, arg)
        if canon(arg) not in object_keys:
            raise PddlParseError(f"unknown object {arg}", tok.line, tok.column, arg)


def parse_problem(text: str, domain: Domain) -> Problem:
    """Parse a PDDL problem against a domain and validate its invariants:
    positive closed-world init, declared predicates with matching arities,
    and constants drawn from (:objects ...).
    """
    tree = _sexpr(text)
    _head(tree, "define")
    if len(tree) < 2 or not isinstance(tree[1], list):
        raise PddlParseError("missing (problem NAME)")
    _head(tree[1], "problem")
    if len(tree[1]) != 2 or not isinstance(tree[1][1], Token):
        raise PddlParseError("malformed (problem NAME)", *_pos(tree[1]))
    name = tree[1][1].value

    domain_name = ""
    objects: list[str] = []
    init: list[Atom] = []
    goal: list[Literal] = []
    seen = {"domain": False, "objects": False, "init": False, "goal": False}

    for section in tree[2:]:
        if not isinstance(section, list) or not section or not isinstance(section[0], Token):
            raise PddlParseError("malformed problem section")
        kw = canon(section[0].value)
        if kw == ":domain":
            seen["domain"] = True
            if len(section) != 2 or not isinstance(section[1], Token):
                raise PddlParseError("malformed (:domain NAME)", *_pos(section))
            domain_name = section[1].value
            if canon(domain_name) != canon(domain.name):
                raise PddlParseError(
                    f"problem targets domain {domain_name!r}, expected {domain.name!r}",
                    section[1].line, section[1].column, domain_name)
        elif kw == ":objects":
            seen["objects"] = True
            for tok in section[1:]:
                if not isinstance(tok, Token) or tok.kind != "symbol":
                    raise PddlParseError("objects must be plain identifiers", *_pos(section))
                if canon(tok.value) in {canon(o) for o in objects}:
                    raise PddlParseError(f"duplicate object {tok.value}",
                                         tok.line, tok.column, tok.value)
                objects.append(tok.value)
        elif kw == ":init":
            seen["init"] = True
            object_keys = {canon(o) for o in objects}
            for form in section[1:]:
                if not isinstance(form, list):
                    raise PddlParseError("malformed init atom",
                                         form.line, form.column, form.value)
                if form and isinstance(form[0], Token) and canon(form[0].value) == "not":
                    raise PddlParseError(
                        "negative literal in init (init is closed-world positive)",
                        form[0].line, form[0].column, "not")
                atom, tok = _atom_from(form, allow_variables=False)
                _check_ground_atom(atom, tok, domain, object_keys)
                if atom.key not in {a.key for a in init}:
                    init.append(atom)
        elif kw == ":goal":
            seen["goal"] = True
            if len(section) != 2 or not isinstance(section[1], list):
                raise PddlParseError("malformed (:goal ...)", *_pos(section))
            object_keys = {canon(o) for o in objects}
            for lit, tok in _conjunction(section[1], allow_variables=False):
                if lit.is_equality:
                    raise PddlParseError("equality not allowed in a goal",
                                         tok.line, tok.column, "=")
                _check_ground_atom(lit.atom, tok, domain, object_keys)
                goal.append(lit)
        else:
            raise PddlParseError(f"unsupported problem section {section[0].value}",
                                 section[0].line, section[0].column, section[0].value)

    if not seen["domain"]:
        raise PddlParseError("problem is missing (:domain ...)")
    return Problem(name, domain_name, tuple(objects), tuple(init), tuple(goal))
