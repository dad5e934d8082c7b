"""Syntax reporting, step execution and goal matching."""
import random

import pytest

from tamploop import asset_path, load_cooking_domain
from tamploop.pddl import ground, parse_problem
from tamploop.pddl.model import Atom, Literal
from tamploop.search import PlanSkeleton, SearchConfig, plan
from tamploop.validate import (
    UnknownActionError,
    check_goal_match,
    simulate,
    validate_syntax,
)

from oracles import action_apply, instantiate_step, run_plan
from taskgen import random_problem

DOMAIN_TEXT = asset_path("cooking_domain.pddl").read_text(encoding="utf-8")


class TestValidateSyntax:
    def test_gold_fixture_ok(self, pick_place_text):
        report = validate_syntax(DOMAIN_TEXT, pick_place_text)
        assert report.ok
        assert not report.errors()

    def test_arity_error(self, pick_place_text):
        broken = pick_place_text.replace("(At cucumber cutting_board)", "(At cucumber)")
        report = validate_syntax(DOMAIN_TEXT, broken)
        assert not report.ok
        assert any("At/2" in d.message for d in report.errors())

    def test_undeclared_object(self, pick_place_text):
        broken = pick_place_text.replace("(At cucumber tray)", "(At banana tray)")
        report = validate_syntax(DOMAIN_TEXT, broken)
        assert not report.ok

    def test_total_on_garbage(self):
        assert not validate_syntax("(((", "(define").ok
        assert not validate_syntax(DOMAIN_TEXT, "not pddl at all").ok
        assert not validate_syntax(DOMAIN_TEXT, "").ok

    def test_never_raises_on_fuzzed_inputs(self, pick_place_text):
        rng = random.Random(3)
        for _ in range(50):
            text = list(pick_place_text)
            for _ in range(rng.randint(1, 5)):
                pos = rng.randrange(len(text))
                text[pos] = rng.choice("()xyz;?: ")
            validate_syntax(DOMAIN_TEXT, "".join(text))


def _skeleton(task, *steps):
    actions = []
    for name, args in steps:
        ga = task.find_action(name, args)
        assert ga is not None, f"no grounding {name}{args}"
        actions.append(ga)
    return PlanSkeleton(tuple(actions))


class TestSimulate:
    def test_valid_pick_place(self, domain, pick_place):
        task = ground(domain, pick_place)
        skel = _skeleton(task, ("pick", ("a_bot", "cucumber", "tray")),
                         ("place", ("a_bot", "cucumber", "cutting_board")))
        report = simulate(task, skel)
        assert report.valid
        final = {a.render() for a in task.state_atoms(report.final_state)}
        assert "(At cucumber cutting_board)" in final
        assert "(isNotFree cutting_board)" in final

    def test_place_alone_fails_with_unmet_grasping(self, domain, pick_place):
        task = ground(domain, pick_place)
        skel = _skeleton(task, ("place", ("a_bot", "cucumber", "cutting_board")))
        report = simulate(task, skel)
        assert not report.valid
        assert report.failed_step == 0
        rendered = {l.render() for l in report.unmet}
        assert "(Grasping a_bot cucumber)" in rendered

    def test_empty_skeleton_with_satisfied_goal(self, domain):
        text = ("(define (problem p) (:domain cooking)"
                " (:objects a_bot cucumber tray)"
                " (:init (Robot a_bot) (PhysicalObject cucumber) (Location tray)"
                " (At cucumber tray) (isNotFree tray) (HandEmpty a_bot))"
                " (:goal (and (At cucumber tray))))")
        task = ground(domain, parse_problem(text, domain))
        assert simulate(task, PlanSkeleton(())).valid

    def test_unknown_action_reference(self, domain, pick_place, slice_food):
        task_a = ground(domain, pick_place)
        task_b = ground(domain, slice_food)
        foreign = next(a for a in task_b.actions if a.name == "equip_tool")
        with pytest.raises(UnknownActionError):
            simulate(task_a, PlanSkeleton((foreign,)))

    def test_monotone_prefix(self, domain, slice_food):
        task = ground(domain, slice_food)
        skel = plan(task, SearchConfig(strategy="bfs", heuristic="none"))
        for k in range(skel.cost + 1):
            prefix = PlanSkeleton(skel.steps[:k])
            report = simulate(task, prefix)
            assert report.failed_step is None

    @pytest.mark.parametrize("chunk", range(2))
    def test_executor_equivalence_random_plans(self, chunk):
        domain = load_cooking_domain()
        rng = random.Random(500 + chunk)
        checked = 0
        while checked < 500:
            problem = random_problem(rng, index=checked)
            task = ground(domain, problem, prune=False)
            if not task.actions:
                continue
            length = rng.randint(1, 6)
            steps = [rng.choice(task.actions) for _ in range(length)]
            skel = PlanSkeleton(tuple(steps))
            report = simulate(task, skel)
            ok, failed, final_keys = run_plan(domain, problem,
                                              skel.signatures())
            if report.failed_step is None:
                assert ok or not report.valid or failed is None
                # both executed fully: final states must agree
                ours = {a.key for a in task.state_atoms(report.final_state)}
                assert ours == set(final_keys)
            else:
                assert not ok
                assert failed == report.failed_step
            checked += 1


class TestGoalMatch:
    def test_wrong_destination_is_mismatch(self, domain, pick_place):
        # plan moves the cucumber yet the gold goal names the cutting board
        text = ("(define (problem p) (:domain cooking)"
                " (:objects a_bot cucumber tray plate cutting_board)"
                " (:init (Robot a_bot) (PhysicalObject cucumber) (Location tray)"
                " (Location plate) (Location cutting_board)"
                " (At cucumber tray) (isNotFree tray) (HandEmpty a_bot))"
                " (:goal (and (At cucumber plate))))")
        problem = parse_problem(text, domain)
        task = ground(domain, problem)
        skel = _skeleton(task, ("pick", ("a_bot", "cucumber", "tray")),
                         ("place", ("a_bot", "cucumber", "plate")))
        report = simulate(task, skel)
        assert report.valid
        gold_goal = (Literal(Atom("At", ("cucumber", "cutting_board"))),)
        assert not check_goal_match(task, report.final_state, gold_goal)

    def test_identical_goal_matches(self, domain, pick_place):
        task = ground(domain, pick_place)
        skel = _skeleton(task, ("pick", ("a_bot", "cucumber", "tray")),
                         ("place", ("a_bot", "cucumber", "cutting_board")))
        report = simulate(task, skel)
        assert check_goal_match(task, report.final_state, task.problem.goal)

    def test_negative_gold_literal_after_emptying_tray(self, domain, pick_place):
        task = ground(domain, pick_place)
        skel = _skeleton(task, ("pick", ("a_bot", "cucumber", "tray")))
        report = simulate(task, skel)
        gold = (Literal(Atom("isNotFree", ("tray",)), negated=True),)
        # hand-checked: pick deletes (isNotFree tray)
        entry = instantiate_step(domain, task.problem, "pick",
                                 ("a_bot", "cucumber", "tray"))
        oracle_final = action_apply(entry, frozenset(a.key for a in task.problem.init))
        assert ("isnotfree", ("tray",)) not in oracle_final
        assert check_goal_match(task, report.final_state, gold)
