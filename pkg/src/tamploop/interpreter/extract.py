"""Pulling structured fragments out of free-form model responses.

Block extraction scans balanced parentheses from the LAST occurrence of the
"(:init" / "(:goal" / "(:objects" marker, because chain-of-thought preambles
may quote the markers earlier in the response.
"""
from __future__ import annotations

import json
import re

from ..pddl.model import Atom, Literal, canon
from ..pddl.parser import PddlParseError, Token, _Reader, _read_list, tokenize
from .data import Detection, normalize_label


class ExtractionError(ValueError):
    def __init__(self, message: str, raw_text: str = ""):
        self.raw_text = raw_text
        super().__init__(message)


def extract_block(text: str, marker: str) -> str:
    """The balanced-paren block starting at the last occurrence of marker."""
    start = text.rfind(marker)
    if start < 0:
        raise ExtractionError(f"no {marker!r} block found in response", text)
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return text[start:i + 1]
    raise ExtractionError(f"unbalanced {marker!r} block in response", text)


def _forms(block: str, raw: str) -> list:
    try:
        tokens = tokenize(block)
        reader = _Reader(tokens)
        reader.expect("(")
        tree = _read_list(reader)
    except PddlParseError as err:
        raise ExtractionError(f"cannot parse block: {err}", raw) from err
    return tree


def parse_init_block(text: str) -> list[Atom]:
    """Ground atoms of the "(:init ...)" block; negatives are rejected
    (closed world)."""
    block = extract_block(text, "(:init")
    tree = _forms(block, text)
    atoms: list[Atom] = []
    for form in tree[1:]:
        if isinstance(form, Token):
            raise ExtractionError(f"stray token {form.value!r} in init block", text)
        if form and isinstance(form[0], Token) and canon(form[0].value) == "not":
            raise ExtractionError("negative literal in init block "
                                  "(initial states are closed-world)", text)
        atoms.append(_ground_atom(form, text))
    return atoms


def parse_goal_block(text: str) -> list[Literal]:
    """Signed ground literals of the "(:goal (and ...))" block."""
    block = extract_block(text, "(:goal")
    tree = _forms(block, text)
    if len(tree) != 2 or isinstance(tree[1], Token):
        raise ExtractionError("goal block must contain a single conjunction", text)
    inner = tree[1]
    if inner and isinstance(inner[0], Token) and canon(inner[0].value) == "and":
        forms = inner[1:]
    else:
        forms = [inner]
    literals: list[Literal] = []
    for form in forms:
        if isinstance(form, Token):
            raise ExtractionError(f"stray token {form.value!r} in goal block", text)
        if form and isinstance(form[0], Token) and canon(form[0].value) == "not":
            if len(form) != 2 or isinstance(form[1], Token):
                raise ExtractionError("malformed negated goal literal", text)
            literals.append(Literal(_ground_atom(form[1], text), negated=True))
        else:
            literals.append(Literal(_ground_atom(form, text)))
    return literals


def parse_objects_block(text: str) -> list[str]:
    block = extract_block(text, "(:objects")
    tree = _forms(block, text)
    names: list[str] = []
    for tok in tree[1:]:
        if not isinstance(tok, Token) or tok.kind != "symbol":
            raise ExtractionError("objects block must list plain identifiers", text)
        names.append(tok.value)
    return names


def _ground_atom(form: list, raw: str) -> Atom:
    if not form or not isinstance(form[0], Token):
        raise ExtractionError("malformed atom in block", raw)
    args = []
    for item in form[1:]:
        if not isinstance(item, Token) or item.kind != "symbol":
            raise ExtractionError(
                f"atom ({form[0].value} ...) must have constant arguments", raw)
        args.append(item.value)
    return Atom(form[0].value, tuple(args))


_BBOX_LINE = re.compile(
    r"^\s*(?P<label>.+?)\s*[:\-]?\s*\[\s*(?P<a>-?\d+(?:\.\d+)?)\s*,"
    r"\s*(?P<b>-?\d+(?:\.\d+)?)\s*,\s*(?P<c>-?\d+(?:\.\d+)?)\s*,"
    r"\s*(?P<d>-?\d+(?:\.\d+)?)\s*\]\s*$")


def parse_detections(text: str) -> list[Detection]:
    """Lines of the form "label [xmin, ymin, xmax, ymax]"."""
    detections: list[Detection] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        match = _BBOX_LINE.match(line)
        if match is None:
            if "[" in line or "]" in line:
                raise ExtractionError(
                    f"line {lineno}: cannot parse detection {line.strip()!r}",
                    text)
            continue  # prose line without a bbox: ignored
        bbox = tuple(int(float(match.group(g))) for g in "abcd")
        detections.append(Detection(match.group("label"), bbox))
    return detections


def detection_identifiers(detections: list[Detection],
                          fixed_objects: tuple[str, ...]) -> list[str]:
    """Detected labels normalized to identifiers, fixed objects appended."""
    out: list[str] = []
    seen: set[str] = set()
    for det in detections:
        ident = normalize_label(det.label)
        if ident and ident not in seen:
            out.append(ident)
            seen.add(ident)
    for name in fixed_objects:
        ident = normalize_label(name)
        if ident and ident not in seen:
            out.append(ident)
            seen.add(ident)
    return out


_STEP_RE = re.compile(r"^\s*(?P<name>[A-Za-z0-9_\-]+)\s*\(\s*(?P<args>[^()]*)\)\s*$")


def parse_plan_strings(text: str) -> list[tuple[str, tuple[str, ...]]]:
    """The last JSON list of "action(arg, ...)" strings in a response."""
    candidates = []
    for start in range(len(text)):
        if text[start] != "[":
            continue
        depth = 0
        for i in range(start, len(text)):
            if text[i] == "[":
                depth += 1
            elif text[i] == "]":
                depth -= 1
                if depth == 0:
                    candidates.append(text[start:i + 1])
                    break
    plan_list = None
    for cand in candidates:
        try:
            data = json.loads(cand)
        except json.JSONDecodeError:
            continue
        if isinstance(data, list) and all(isinstance(x, str) for x in data):
            plan_list = data
    if plan_list is None:
        raise ExtractionError("no JSON action list found in response", text)
    steps: list[tuple[str, tuple[str, ...]]] = []
    for item in plan_list:
        match = _STEP_RE.match(item)
        if match is None:
            raise ExtractionError(f"malformed action string {item!r}", text)
        args = tuple(a.strip() for a in match.group("args").split(",") if a.strip())
        steps.append((match.group("name"), args))
    return steps
