"""Corrective-planning loop behavior: budget discipline, history, recovery."""
import json

import pytest

from tamploop.bench.harness import oracle_model_for
from tamploop.bench.suite import build_suite
from tamploop.geometry import SceneModel
from tamploop.interpreter import RecordedModel, RecordingModel
from tamploop.loop import (
    OrchestratorConfig,
    execute_stub,
    record_from_dict,
    run_trial,
)
from tamploop.loop import _inject_reach_facts
from tamploop.pddl import ground, parse_problem, render_problem
from tamploop.search import SearchConfig

from scripted import ScriptedFaultModel, fault_suite

BUDGET_ONE = SearchConfig(skeleton_budget=1)


@pytest.fixture(scope="module")
def suite():
    return build_suite(seed=0, check=False)


@pytest.fixture(scope="module")
def by_id(suite):
    return {i.instance_id: i for i in suite}


class TestOracleTrials:
    def test_oracle_success_without_cp(self, suite):
        instance = suite[0]
        config = OrchestratorConfig(n_cp_max=0)
        record = run_trial(instance, config, oracle_model_for(instance))
        assert record.outcome == "success"
        assert record.cp_count == 0
        assert record.syntax_ok and record.plan_ok
        assert record.solution is not None

    def test_round_trip_serialization(self, suite):
        instance = suite[0]
        config = OrchestratorConfig(n_cp_max=0)
        record = run_trial(instance, config, oracle_model_for(instance))
        data = record.to_dict()
        again = record_from_dict(data)
        assert again.to_dict() == data


class TestScriptedRecovery:
    def test_task_fault_repaired_at_round_one(self, by_id):
        # omit (HandEmpty b_bot) on a slice task: fixturing and equipping
        # need both hands, so the task planner proves it unsolvable
        instance = by_id["slice-food-00"]
        model = ScriptedFaultModel(instance, "missing-handempty-b",
                                   repair_round=1)
        config = OrchestratorConfig(n_cp_max=1)
        record = run_trial(instance, config, model)
        assert record.outcome == "success"
        assert record.cp_count == 1
        assert len(record.history) == 1
        assert record.history.feedbacks[0].origin == "task-planner"
        assert "(HandEmpty b_bot)" not in record.initial_problem
        assert "(HandEmpty b_bot)" in record.history.problems[0]

    def test_never_repaired_exhausts_budget(self, by_id):
        instance = by_id["pick-place-00"]
        model = ScriptedFaultModel(instance, "missing-handempty",
                                   repair_round=99)
        config = OrchestratorConfig(n_cp_max=3)
        record = run_trial(instance, config, model)
        assert record.outcome == "failure"
        assert record.cp_count == 3
        assert len(record.history) == 3
        assert record.terminal_feedback is not None

    def test_motion_fault_needs_cp_when_cycling_disabled(self, by_id):
        instance = by_id["pick-obstacles-single-00"]
        model = ScriptedFaultModel(instance, "missing-isnotfree",
                                   repair_round=1)
        no_cp = OrchestratorConfig(n_cp_max=0, search=BUDGET_ONE)
        record = run_trial(instance, no_cp, model)
        assert record.outcome == "failure"
        assert record.failure_phase == "motion"
        assert record.terminal_feedback.origin == "motion-planner"
        with_cp = OrchestratorConfig(n_cp_max=1, search=BUDGET_ONE)
        record2 = run_trial(instance, with_cp, model)
        assert record2.outcome == "success"

    def test_syntax_fault_repaired(self, by_id):
        instance = by_id["pick-place-02"]
        model = ScriptedFaultModel(instance, "broken-goal", repair_round=1)
        config = OrchestratorConfig(n_cp_max=1)
        record = run_trial(instance, config, model)
        assert record.outcome == "success"
        assert record.syntax_ok is False
        assert record.history.feedbacks[0].origin == "task-planner"
        assert any("arity" in c for c in record.history.feedbacks[0].comments)


class TestFaultSuite:
    def test_cp_sweep_monotone(self, suite):
        cases = fault_suite(suite)
        assert len(cases) == 12
        successes = {}
        for n_cp in (0, 1, 2, 3):
            config = OrchestratorConfig(n_cp_max=n_cp, search=BUDGET_ONE)
            count = 0
            for instance, fault, repair in cases:
                model = ScriptedFaultModel(instance, fault, repair)
                record = run_trial(instance, config, model)
                if record.outcome == "success":
                    count += 1
            successes[n_cp] = count
        assert successes[0] == 0
        assert successes[3] == 12
        assert successes[0] <= successes[1] <= successes[2] <= successes[3]
        # repairs are spread over rounds 1..3, four cases each
        assert successes[1] == 4 and successes[2] == 8

    def test_fault_suite_replays_from_transcripts(self, suite, tmp_path):
        cases = fault_suite(suite)[:4]
        config = OrchestratorConfig(n_cp_max=3, search=BUDGET_ONE)
        for index, (instance, fault, repair) in enumerate(cases):
            recorder = RecordingModel(ScriptedFaultModel(instance, fault,
                                                         repair))
            live = run_trial(instance, config, recorder)
            recorder.save(tmp_path / f"case{index}.json")
            replayed = run_trial(instance, config,
                                 RecordedModel(tmp_path / f"case{index}.json"))
            assert replayed.to_dict() == live.to_dict()


class TestHistoryDiscipline:
    def test_history_lengths_match_cp_count(self, by_id):
        instance = by_id["pick-place-00"]
        model = ScriptedFaultModel(instance, "missing-handempty",
                                   repair_round=2)
        config = OrchestratorConfig(n_cp_max=3)
        record = run_trial(instance, config, model)
        assert record.outcome == "success"
        assert record.cp_count == 2
        assert len(record.history.problems) == len(record.history.feedbacks) == 2

    def test_accumulated_history_repeats_blocks(self, by_id):
        instance = by_id["pick-place-00"]

        class Spy(RecordingModel):
            def __init__(self, inner):
                super().__init__(inner)
                self.revision_prompts = []

            def complete(self, request):
                prompt = request.messages[-1][1]
                if "revised specification" in prompt:
                    self.revision_prompts.append(prompt)
                return super().complete(request)

        spy = Spy(ScriptedFaultModel(instance, "missing-handempty", 3))
        config = OrchestratorConfig(n_cp_max=3)
        run_trial(instance, config, spy)
        counts = [p.count("You created the following problem specification:")
                  for p in spy.revision_prompts]
        assert counts == [1, 2, 3]

    def test_strict_history_resets_blocks(self, by_id):
        instance = by_id["pick-place-00"]

        class Spy(RecordingModel):
            def __init__(self, inner):
                super().__init__(inner)
                self.revision_prompts = []

            def complete(self, request):
                prompt = request.messages[-1][1]
                if "revised specification" in prompt:
                    self.revision_prompts.append(prompt)
                return super().complete(request)

        spy = Spy(ScriptedFaultModel(instance, "missing-handempty", 3))
        config = OrchestratorConfig(n_cp_max=3, strict_history=True)
        run_trial(instance, config, spy)
        counts = [p.count("You created the following problem specification:")
                  for p in spy.revision_prompts]
        assert counts == [1, 1, 1]


class TestBaselinePipeline:
    def test_oracle_baseline_succeeds(self, suite):
        instance = suite[0]
        config = OrchestratorConfig(n_cp_max=0, pipeline="baseline")
        record = run_trial(instance, config, oracle_model_for(instance))
        assert record.outcome == "success"
        assert record.syntax_ok is None
        assert record.initial_problem.startswith("[")

    def test_baseline_all_kinds(self, suite):
        config = OrchestratorConfig(n_cp_max=0, pipeline="baseline")
        for kind in ("pick-place", "pick-obstacles-dual",
                     "pick-obstacles-single", "slice-food", "slice-serve"):
            instance = next(i for i in suite if i.kind == kind)
            record = run_trial(instance, config, oracle_model_for(instance))
            assert record.outcome == "success", (kind, record.failure_phase)


class TestExecuteStub:
    def test_pick_place_snaps_position(self, domain, suite):
        instance = next(i for i in suite if i.kind == "pick-place")
        config = OrchestratorConfig(n_cp_max=0)
        record = run_trial(instance, config, oracle_model_for(instance))
        task = ground(domain, instance.gold_problem)
        state, scene = execute_stub(record.solution, task, instance.scene)
        food = instance.gold_problem.goal[0].atom.args[0]
        target = instance.gold_problem.goal[0].atom.args[1]
        assert scene.objects[food].position == \
            scene.locations[target].center

    def test_slice_keeps_position_sets_fact(self, domain, suite):
        instance = next(i for i in suite if i.kind == "slice-food"
                        and len(i.gold_problem.goal) == 1)
        config = OrchestratorConfig(n_cp_max=0)
        record = run_trial(instance, config, oracle_model_for(instance))
        food = instance.gold_problem.goal[0].atom.args[0]
        assert f"(isSliced {food})" in record.final_state
        assert f"(At {food} cutting_board)" in record.final_state

    def test_serve_final_state(self, suite):
        instance = next(i for i in suite if i.kind == "slice-serve")
        config = OrchestratorConfig(n_cp_max=0)
        record = run_trial(instance, config, oracle_model_for(instance))
        food = instance.gold_problem.goal[0].atom.args[0]
        assert f"(Served {food} bowl)" in record.final_state
        assert f"(At {food} cutting_board)" not in record.final_state


class TestAutoFacts:
    def test_reach_facts_appended(self, domain):
        scene = SceneModel.load("tests/fixtures/scene_unreachable_knife.json")
        text = ("(define (problem p) (:domain cooking)"
                " (:objects a_bot cucumber knife tray cutting_board knife_holder)"
                " (:init (Robot a_bot) (PhysicalObject cucumber) (Tool knife)"
                " (Location tray) (Location cutting_board)"
                " (Location knife_holder) (ToolHolder knife_holder)"
                " (isWorkspace cutting_board) (HandEmpty a_bot)"
                " (At cucumber tray) (At knife knife_holder) (isNotFree tray)"
                " (isNotFree knife_holder))"
                " (:goal (and (isSliced cucumber))))")
        out = _inject_reach_facts(text, scene, domain)
        assert "(CanNotReach a_bot knife knife_holder)" in out
        assert "(CanNotReach a_bot cucumber knife_holder)" in out
        # idempotent: injecting twice adds nothing new
        assert _inject_reach_facts(out, scene, domain) == out

    def test_unparseable_text_passes_through(self, domain):
        scene = SceneModel.load("tests/fixtures/scene_unreachable_knife.json")
        assert _inject_reach_facts("garbage", scene, domain) == "garbage"
