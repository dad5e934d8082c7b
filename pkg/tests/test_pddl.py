"""Parser, renderer and grounding tests for the PDDL core."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from tamploop import asset_path, load_cooking_domain
from tamploop.pddl import (
    Atom,
    PddlParseError,
    canon,
    enumerate_ground_actions,
    ground,
    parse_domain,
    parse_problem,
    render_domain,
    render_problem,
)

from oracles import naive_ground
from taskgen import random_problem

EXPECTED_ACTIONS = ["pick", "place", "equip_tool", "fixture", "slice",
                    "unequip_tool", "clean_up", "serve_food"]


class TestParseDomain:
    def test_cooking_domain_shape(self, domain):
        assert len(domain.predicates) == 16
        assert [a.name for a in domain.actions] == EXPECTED_ACTIONS
        pred_names = {p.name for p in domain.predicates}
        assert {"Robot", "At", "CanNotReach", "isNotFree", "Served"} <= pred_names

    def test_minimal_domain(self):
        d = parse_domain("(define (domain d) (:requirements :strips) (:predicates (p ?x)))")
        assert len(d.predicates) == 1
        assert len(d.actions) == 0

    def test_deleted_predicate_reports_first_use(self):
        text = asset_path("cooking_domain.pddl").read_text(encoding="utf-8")
        broken = "\n".join(l for l in text.splitlines() if "(At ?obj ?loc) ;" not in l)
        with pytest.raises(PddlParseError, match="undeclared predicate At"):
            parse_domain(broken)

    def test_negative_precondition_warning(self, domain):
        # the cooking domain declares only :strips :equality
        assert any("negative precondition" in w for w in domain.warnings)

    def test_duplicate_predicate_case_insensitive(self):
        with pytest.raises(PddlParseError, match="duplicate predicate"):
            parse_domain("(define (domain d) (:predicates (p ?x) (P ?y)))")

    def test_unknown_requirement(self):
        with pytest.raises(PddlParseError, match="unknown requirement"):
            parse_domain("(define (domain d) (:requirements :adl))")

    def test_unbalanced_parens(self):
        with pytest.raises(PddlParseError, match="unbalanced"):
            parse_domain("(define (domain d) (:predicates (p ?x))")

    def test_unbound_variable(self):
        with pytest.raises(PddlParseError, match="unbound variable"):
            parse_domain(
                "(define (domain d) (:predicates (p ?x))"
                " (:action a :parameters (?x) :precondition (p ?x) :effect (p ?y)))")

    def test_arity_mismatch_in_action_body(self):
        with pytest.raises(PddlParseError, match="arity mismatch for p/1"):
            parse_domain(
                "(define (domain d) (:predicates (p ?x))"
                " (:action a :parameters (?x ?y) :precondition (p ?x ?y) :effect (p ?x)))")

    def test_effect_equality_rejected(self):
        with pytest.raises(PddlParseError, match="equality"):
            parse_domain(
                "(define (domain d) (:requirements :equality) (:predicates (p ?x))"
                " (:action a :parameters (?x ?y) :precondition (p ?x) :effect (= ?x ?y)))")

    def test_contradictory_effect_rejected(self):
        with pytest.raises(PddlParseError, match="both positively and negatively"):
            parse_domain(
                "(define (domain d) (:predicates (p ?x))"
                " (:action a :parameters (?x) :precondition (p ?x)"
                " :effect (and (p ?x) (not (p ?x)))))")

    def test_lexical_error_position(self):
        with pytest.raises(PddlParseError) as err:
            parse_domain("(define (domain d)\n  (:predicates {p ?x)))")
        assert err.value.line == 2

    def test_domain_render_round_trip(self, domain):
        again = parse_domain(render_domain(domain))
        assert again.predicates == domain.predicates
        assert again.actions == domain.actions
        assert again.name == domain.name


class TestParseProblem:
    def test_pick_place_fixture(self, pick_place):
        assert len(pick_place.init) == 7
        assert len(pick_place.objects) == 4
        assert pick_place.goal[0].atom == Atom("At", ("cucumber", "cutting_board"))

    def test_negative_init_rejected(self, domain, pick_place_text):
        broken = pick_place_text.replace("(HandEmpty a_bot)",
                                         "(not (HandEmpty a_bot))")
        with pytest.raises(PddlParseError, match="negative literal in init"):
            parse_problem(broken, domain)

    def test_goal_arity_mismatch_names_predicate(self, domain, pick_place_text):
        broken = pick_place_text.replace("(At cucumber cutting_board)", "(At cucumber)")
        with pytest.raises(PddlParseError, match="At/2"):
            parse_problem(broken, domain)

    def test_unknown_object(self, domain, pick_place_text):
        broken = pick_place_text.replace("(At cucumber tray)", "(At banana tray)")
        with pytest.raises(PddlParseError, match="unknown object banana"):
            parse_problem(broken, domain)

    def test_unknown_predicate(self, domain, pick_place_text):
        broken = pick_place_text.replace("(HandEmpty a_bot)", "(GripperFree a_bot)")
        with pytest.raises(PddlParseError, match="unknown predicate"):
            parse_problem(broken, domain)


class TestRender:
    def test_init_sorted(self, pick_place):
        text = render_problem(pick_place)
        init_section = text.split("(:init")[1].split(")")[0]
        lines = [l.strip() for l in init_section.strip().splitlines() if l.strip()]
        assert lines == sorted(lines)

    def test_empty_goal_normalized(self, domain):
        p = parse_problem(
            "(define (problem p) (:domain cooking) (:objects a_bot)"
            " (:init (Robot a_bot)) (:goal (and)))", domain)
        assert "(:goal (and))" in render_problem(p)

    def test_round_trip_fixed_point(self, domain, pick_place_text, slice_food_text):
        for text in (pick_place_text, slice_food_text):
            p1 = parse_problem(text, domain)
            r1 = render_problem(p1)
            p2 = parse_problem(r1, domain)
            assert p1 == p2
            assert render_problem(p2) == r1

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_round_trip_random_problems(self, seed):
        domain = load_cooking_domain()
        problem = random_problem(random.Random(seed))
        rendered = render_problem(problem)
        again = parse_problem(rendered, domain)
        assert render_problem(again) == rendered
        assert {a.key for a in again.init} == {a.key for a in problem.init}


def _small_problem(domain, objects, init, goal="(At cucumber l1)"):
    text = (f"(define (problem t) (:domain cooking) (:objects {' '.join(objects)})"
            f" (:init {' '.join(init)}) (:goal (and {goal})))")
    return parse_problem(text, domain)


class TestGround:
    def test_pick_one_robot_two_locations(self, domain):
        p = _small_problem(
            domain,
            ["a_bot", "cucumber", "l1", "l2"],
            ["(Robot a_bot)", "(PhysicalObject cucumber)", "(Location l1)",
             "(Location l2)", "(At cucumber l1)", "(HandEmpty a_bot)"])
        task = ground(domain, p)
        picks = [a for a in task.actions if a.name == "pick"]
        assert len(picks) == 2

    def test_place_twelve_groundings_before_pruning(self, domain):
        p = _small_problem(
            domain,
            ["a_bot", "b_bot", "cucumber", "carrot", "l1", "l2", "l3"],
            ["(Robot a_bot)", "(Robot b_bot)", "(PhysicalObject cucumber)",
             "(PhysicalObject carrot)", "(Location l1)", "(Location l2)",
             "(Location l3)", "(At cucumber l1)", "(At carrot l2)",
             "(HandEmpty a_bot)", "(HandEmpty b_bot)"])
        entries = enumerate_ground_actions(domain, p)
        places = [e for e in entries if canon(e[0].name) == "place"]
        assert len(places) == 12

    def test_slice_food_counts_match_bruteforce(self, domain, slice_food):
        task = ground(domain, slice_food, prune=False)
        oracle = naive_ground(domain, slice_food)
        assert len(task.actions) == len(oracle)
        ours = sorted(a.key for a in task.actions)
        theirs = sorted((canon(e["name"]), tuple(canon(x) for x in e["args"]))
                        for e in oracle)
        assert ours == theirs

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_grounding_matches_bruteforce_on_random_problems(self, seed):
        domain = load_cooking_domain()
        problem = random_problem(random.Random(seed))
        task = ground(domain, problem, prune=False)
        oracle = naive_ground(domain, problem)
        ours = sorted(a.key for a in task.actions)
        theirs = sorted((canon(e["name"]), tuple(canon(x) for x in e["args"]))
                        for e in oracle)
        assert ours == theirs

    def test_grounding_soundness_resubstitution(self, domain, slice_food):
        task = ground(domain, slice_food, prune=False)
        rng = random.Random(7)
        sample = rng.sample(list(task.actions), min(60, len(task.actions)))
        for ga in sample:
            schema = domain.action(ga.name)
            binding = dict(zip(schema.parameters, ga.args))
            expected_pos, expected_neg = set(), set()
            for lit in schema.precondition:
                g = lit.substitute(binding)
                if g.is_equality:
                    continue
                (expected_neg if g.negated else expected_pos).add(g.atom.key)
            got_pos = {task.facts[i].key for i in ga.pos_pre}
            got_neg = {task.facts[i].key for i in ga.neg_pre}
            assert got_pos == expected_pos
            assert got_neg == expected_neg
            expected_add = {lit.substitute(binding).atom.key
                            for lit in schema.effect if not lit.negated}
            expected_del = {lit.substitute(binding).atom.key
                            for lit in schema.effect if lit.negated}
            assert {task.facts[i].key for i in ga.add} == expected_add
            assert {task.facts[i].key for i in ga.delete} == expected_del

    def test_pruning_drops_unreachable(self, domain):
        # knife exists but never reachable: no fixture-capable workspace
        p = _small_problem(
            domain,
            ["a_bot", "cucumber", "l1", "l2"],
            ["(Robot a_bot)", "(PhysicalObject cucumber)", "(Location l1)",
             "(Location l2)", "(At cucumber l1)", "(HandEmpty a_bot)"])
        task = ground(domain, p)
        # no Tool objects: no equip/slice groundings at all
        assert not [a for a in task.actions if a.name in ("equip_tool", "slice")]
        # no workspace: fixture is statically impossible
        assert not [a for a in task.actions if a.name == "fixture"]

    def test_cannotreach_statically_prunes(self, domain):
        p = _small_problem(
            domain,
            ["a_bot", "cucumber", "l1", "l2"],
            ["(Robot a_bot)", "(PhysicalObject cucumber)", "(Location l1)",
             "(Location l2)", "(At cucumber l1)", "(HandEmpty a_bot)",
             "(CanNotReach a_bot cucumber l1)"])
        task = ground(domain, p, prune=False)
        picks = [a.args for a in task.actions if a.name == "pick"]
        assert ("a_bot", "cucumber", "l1") not in picks
        assert ("a_bot", "cucumber", "l2") in picks

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(0, 2**32 - 1))
    def test_closed_world_negative_test(self, seed, state_seed):
        domain = load_cooking_domain()
        problem = random_problem(random.Random(seed))
        task = ground(domain, problem, prune=False)
        if not task.facts:
            return
        rng = random.Random(state_seed)
        state = 0
        for i in range(len(task.facts)):
            if rng.random() < 0.5:
                state |= 1 << i
        for i in range(len(task.facts)):
            absent = not (state >> i & 1)
            # a negative literal over an absent atom must pass the mask test
            if absent:
                assert (state & (1 << i)) == 0
