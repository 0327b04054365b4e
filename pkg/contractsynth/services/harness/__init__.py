"""Exact interpretation and randomized conformance checking of implementations."""

from .conformance import ConformanceReport, Trace, Violation, run_trace, run_traces
from .interpreter import Implementation, initial_state, interpret_step
from .sampler import InputSampler

__all__ = [
    "ConformanceReport",
    "Implementation",
    "InputSampler",
    "Trace",
    "Violation",
    "initial_state",
    "interpret_step",
    "run_trace",
    "run_traces",
]
