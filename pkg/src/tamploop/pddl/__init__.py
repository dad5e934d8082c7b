"""PDDL parsing, rendering and grounding for the cooking-domain subset."""

from .model import (
    ActionSchema,
    Atom,
    DescriptionsError,
    Domain,
    Literal,
    PredicateSchema,
    Problem,
    canon,
    load_descriptions,
)
from .parser import PddlParseError, parse_domain, parse_problem
from .render import (
    render_action_definitions,
    render_domain,
    render_goal_block,
    render_init_block,
    render_predicate_definitions,
    render_problem,
)
from .ground import (
    GroundAction,
    GroundTask,
    GroundingError,
    enumerate_ground_actions,
    ground,
    relaxed_reachable_facts,
)

__all__ = [
    "ActionSchema", "Atom", "DescriptionsError", "Domain", "Literal",
    "PredicateSchema", "Problem", "canon", "load_descriptions",
    "PddlParseError", "parse_domain", "parse_problem",
    "render_action_definitions", "render_domain", "render_goal_block",
    "render_init_block", "render_predicate_definitions", "render_problem",
    "GroundAction", "GroundTask", "GroundingError",
    "enumerate_ground_actions", "ground", "relaxed_reachable_facts",
]
