"""Randomized conformance of an implementation against its contract."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Mapping, Optional, Tuple

from ...core.errors import CoverageHoleError
from ...core.logic import Model, Value, evaluate
from ...core.solver import SolverSession
from ..frontend.problem import SynthesisProblem, next_var
from .interpreter import Implementation
from .sampler import InputSampler

logger = logging.getLogger(__name__)

COVERAGE_HOLE = "coverage hole"


@dataclass
class Trace:
    seed: int
    inputs: List[Model] = field(default_factory=list)
    states: List[Model] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.inputs)


@dataclass(frozen=True)
class Violation:
    trace: int
    step: int
    conjunct: str
    valuation: Mapping[str, Value]


@dataclass
class ConformanceReport:
    traces: int = 0
    steps: int = 0
    violations: List[Violation] = field(default_factory=list)
    dead_ends: int = 0
    failed_traces: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def coverage_holes(self) -> int:
        return sum(1 for v in self.violations if v.conjunct == COVERAGE_HOLE)

    def to_text(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        lines = [f"{verdict} {self.traces - self.failed_traces}/{self.traces}"]
        lines.append(f"steps: {self.steps}, dead ends: {self.dead_ends}")
        for v in self.violations[:20]:
            lines.append(f"trace {v.trace} step {v.step}: {v.conjunct} violated at {_render(v.valuation)}")
        if len(self.violations) > 20:
            lines.append(f"... {len(self.violations) - 20} more")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            {
                "status": "pass" if self.passed else "fail",
                "traces": self.traces,
                "steps": self.steps,
                "dead_ends": self.dead_ends,
                "coverage_holes": self.coverage_holes,
                "violations": [
                    {
                        "trace": v.trace,
                        "step": v.step,
                        "conjunct": v.conjunct,
                        "valuation": {k: _jsonable(x) for k, x in sorted(v.valuation.items())},
                    }
                    for v in self.violations
                ],
            },
            indent=2,
        )


def _jsonable(value: Value) -> Any:
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    return value


def _render(valuation: Mapping[str, Value]) -> str:
    return "{" + ", ".join(f"{k}={_jsonable(v)}" for k, v in sorted(valuation.items())) + "}"


def failed_initial(p: SynthesisProblem, state: Mapping[str, Value]) -> List[str]:
    return [label for label, f in p.init_conjuncts if not evaluate(f, state)]


def transition_valuation(
    p: SynthesisProblem, prev: Mapping[str, Value], inputs: Mapping[str, Value], nxt: Mapping[str, Value]
) -> Model:
    env: Model = dict(prev)
    env.update(inputs)
    env.update({next_var(v).name: nxt[v.name] for v in p.observables})
    return env


def failed_transition(
    p: SynthesisProblem, prev: Mapping[str, Value], inputs: Mapping[str, Value], nxt: Mapping[str, Value]
) -> List[str]:
    env = transition_valuation(p, prev, inputs, nxt)
    return [label for label, f in p.trans_conjuncts if not evaluate(f, env)]


def trace_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def run_trace(
    p: SynthesisProblem, result, length: int, seed: int, sampler: InputSampler, index: int = 0
) -> Tuple[Trace, List[Violation], bool]:
    """One trace; the flag tells whether it ended at an assumption dead end."""
    rng = random.Random(seed)
    impl = Implementation.from_result(p, result)
    state = impl.reset()
    trace = Trace(seed, states=[state])
    violations = [Violation(index, 0, label, state) for label in failed_initial(p, state)]
    for step in range(1, length + 1):
        inputs = sampler.sample(state, rng)
        if inputs is None:
            return trace, violations, True
        try:
            nxt = impl.step(inputs)
        except CoverageHoleError as exc:
            violations.append(Violation(index, step, COVERAGE_HOLE, exc.valuation))
            break
        for label in failed_transition(p, state, inputs, nxt):
            violations.append(Violation(index, step, label, transition_valuation(p, state, inputs, nxt)))
        trace.inputs.append(dict(inputs))
        trace.states.append(nxt)
        state = nxt
    return trace, violations, False


def run_traces(
    p: SynthesisProblem,
    result,
    n_traces: int = 1000,
    length: int = 50,
    seed: int = 42,
    session: Optional[SolverSession] = None,
) -> ConformanceReport:
    """Run ``n_traces`` seeded traces and check every guarantee along the way."""
    sampler = InputSampler(p, session)
    report = ConformanceReport()
    for index in range(n_traces):
        trace, violations, dead_end = run_trace(p, result, length, trace_seed(seed, index), sampler, index)
        report.traces += 1
        report.steps += len(trace)
        report.dead_ends += int(dead_end)
        if violations:
            report.failed_traces += 1
            report.violations.extend(violations)
    logger.info(
        "%s: %d traces, %d steps, %d violations, %d dead ends",
        p.name,
        report.traces,
        report.steps,
        len(report.violations),
        report.dead_ends,
    )
    return report
