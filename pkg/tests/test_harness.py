import json
import random
from fractions import Fraction

import pytest

from contractsynth.core.errors import CoverageHoleError
from contractsynth.core.logic import Cmp, IntConst, Sort, Var
from contractsynth.services.frontend import load_problem
from contractsynth.services.harness import (
    ConformanceReport,
    Implementation,
    InputSampler,
    Violation,
    initial_state,
    run_trace,
    run_traces,
)
from contractsynth.services.harness.conformance import failed_initial, trace_seed
from contractsynth.services.harness.interpreter import window_valuation
from contractsynth.services.realizability import RealizabilityEngine

from conftest import echo_result

FAR_AWAY = "node n(a : int) returns (b : int); let assert a = 1000; b = a; --%REALIZABLE a; tel;"


def test_window_valuation_binds_positions_and_input_copies():
    p, _ = echo_result(k=1)
    window = [{"a": 1, "b": 1}, {"a": 2, "b": 2}]
    assert window_valuation(p, window, {"a@in": 5}) == {
        "a@0": 1,
        "b@0": 1,
        "a@1": 2,
        "b@1": 2,
        "a@in1": 2,
        "a@in": 5,
    }


def test_initial_state_recomputes_inlined_variables(load_contract):
    p = load_contract("repeats.lus")
    state = initial_state(p, {"x": 0, "state": 0, "bias": 0, "bias_max": False})
    assert state["guarantee_all"] is True
    assert set(state) == {v.name for v in p.observables}


@pytest.mark.parametrize("k", [0, 1, 2])
def test_implementation_follows_its_cascades(k):
    p, result = echo_result(k=k)
    impl = Implementation.from_result(p, result)
    assert impl.state == {"a": 0, "b": 0}
    for value in (4, -3, 9, 9):
        assert impl.step({"a@in": value}) == {"a": value, "b": value}
        assert len(impl.history) <= k + 1
    assert impl.reset() == {"a": 0, "b": 0}


def test_uncovered_inputs_raise_coverage_holes():
    p, result = echo_result(guard=Cmp(">", Var("a@in", Sort.INT), IntConst(0)))
    impl = Implementation.from_result(p, result)
    impl.step({"a@in": 2})
    with pytest.raises(CoverageHoleError) as info:
        impl.step({"a@in": -1})
    assert info.value.valuation["a@in"] == -1


def test_failed_initial_labels():
    p, _ = echo_result()
    assert failed_initial(p, {"a": 0, "b": 0}) == []
    assert failed_initial(p, {"a": 0, "b": 1}) == ["equation b"]


def test_correct_implementation_passes():
    p, result = echo_result(k=1)
    report = run_traces(p, result, n_traces=20, length=10, seed=7)
    assert report.passed
    assert report.steps == 200 and report.dead_ends == 0
    assert report.to_text().splitlines()[0] == "PASS 20/20"
    assert json.loads(report.to_json())["status"] == "pass"


def test_broken_implementation_is_caught():
    p, result = echo_result(offset=1)
    report = run_traces(p, result, n_traces=5, length=3, seed=7)
    assert not report.passed
    assert report.failed_traces == 5
    first = report.violations[0]
    assert (first.trace, first.step, first.conjunct) == (0, 1, "equation b")
    assert report.to_text().splitlines()[0] == "FAIL 0/5"
    doc = json.loads(report.to_json())
    assert doc["status"] == "fail" and doc["coverage_holes"] == 0


def test_coverage_holes_are_violations():
    p, result = echo_result(guard=Cmp(">", Var("a@in", Sort.INT), IntConst(100)))
    report = run_traces(p, result, n_traces=3, length=5, seed=1)
    assert report.coverage_holes == 3
    assert all(v.step == 1 for v in report.violations)


def test_traces_are_reproducible():
    p, result = echo_result(k=1)
    sampler = InputSampler(p)
    first, _, _ = run_trace(p, result, 15, trace_seed(42, 3), sampler)
    second, _, _ = run_trace(p, result, 15, trace_seed(42, 3), sampler)
    assert first.inputs == second.inputs and len(first) == 15
    assert trace_seed(42, 3) != trace_seed(42, 4)


def test_report_rendering_of_rationals():
    report = ConformanceReport(traces=1, failed_traces=1)
    report.violations.append(Violation(0, 2, "property ok", {"u@next": Fraction(1, 3), "t@in": Fraction(4)}))
    assert "trace 0 step 2: property ok violated at {t@in=4, u@next=1/3}" in report.to_text()
    assert json.loads(report.to_json())["violations"][0]["valuation"] == {"t@in": 4, "u@next": "1/3"}


def test_sampler_respects_the_assumption(load_contract):
    p = load_contract("comparator.lus")
    sampler = InputSampler(p)
    rng = random.Random(5)
    for _ in range(500):
        inputs = sampler.sample({}, rng)
        assert inputs["x@in"] != inputs["y@in"]


def test_sampler_reals_are_dyadic(load_contract):
    p = load_contract("thermostat.lus")
    sampler = InputSampler(p)
    rng = random.Random(6)
    for _ in range(200):
        value = sampler.random_value(Sort.REAL, rng)
        assert value.denominator in (1, 2, 4, 8)


def test_sampling_alone_reports_dead_ends():
    p = load_problem(FAR_AWAY)
    assert InputSampler(p).sample({"a": 1000, "b": 1000}, random.Random(0)) is None


def test_solver_finds_rare_inputs(session):
    p = load_problem(FAR_AWAY)
    sampler = InputSampler(p, session)
    assert sampler.sample({"a": 1000, "b": 1000}, random.Random(0)) == {"a@in": 1000}
    assert session.depth == 0


def test_synthesized_comparator_orders_its_inputs(solver_cmd, load_contract):
    p = load_contract("comparator.lus")
    impl = Implementation.from_result(p, RealizabilityEngine(p, solver_cmd).run())
    sampler = InputSampler(p)
    rng = random.Random(42)
    for _ in range(1000):
        inputs = sampler.sample(impl.state, rng)
        state = impl.step(inputs)
        assert state["z"] == (inputs["x@in"] < inputs["y@in"])


def test_solver_backed_traces(solver_cmd, load_contract, session):
    p = load_contract("repeats.lus")
    result = RealizabilityEngine(p, solver_cmd).run()
    report = run_traces(p, result, n_traces=10, length=20, seed=3, session=session)
    assert report.passed and report.dead_ends == 0
    assert report.steps == 200


@pytest.mark.slow
def test_running_example_conforms_deterministically(solver_cmd, load_contract):
    p = load_contract("repeats.lus")
    result = RealizabilityEngine(p, solver_cmd).run()
    first = run_traces(p, result, n_traces=1000, length=50, seed=42)
    second = run_traces(p, result, n_traces=1000, length=50, seed=42)
    assert first.passed and first.coverage_holes == 0
    assert first.to_json() == second.to_json()
