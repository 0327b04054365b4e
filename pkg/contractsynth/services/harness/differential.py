"""Compile an emitted program and compare its output with the exact interpreter."""

from __future__ import annotations

import logging
import os
import shutil
import subprocess
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence

from ...core.config import load_config
from ...core.errors import SynthError
from ...core.logic import Model, Sort, Value
from ..codegen.c_emitter import EmittedProgram

logger = logging.getLogger(__name__)

CFLAGS = ["-std=c99", "-Wall", "-Werror", "-DDRIVER"]
REAL_TOLERANCE = 1e-9


class CompilationError(SynthError):
    def __init__(self, message: str, output: str = ""):
        super().__init__(message)
        self.output = output


def find_compiler(cc: Optional[str] = None) -> Optional[str]:
    """Path of ``cc``, or of the configured ``SYNT_CC`` compiler when none is named."""
    return shutil.which(cc or load_config().cc)


def compile_program(program: EmittedProgram, workdir: str, cc: Optional[str] = None) -> str:
    cc = cc or load_config().cc
    compiler = find_compiler(cc)
    if compiler is None:
        raise CompilationError(f"C compiler {cc!r} not found")
    source = os.path.join(workdir, f"{program.node}.c")
    binary = os.path.join(workdir, program.node)
    program.write(source)
    proc = subprocess.run(
        [compiler, *CFLAGS, "-o", binary, source], capture_output=True, text=True, check=False
    )
    if proc.returncode != 0:
        raise CompilationError(f"{compiler} failed with exit code {proc.returncode}", proc.stderr)
    logger.debug("compiled %s", binary)
    return binary


def _format(value: Value, sort: Sort) -> str:
    if sort is Sort.BOOL:
        return "1" if value else "0"
    if sort is Sort.REAL:
        frac = Fraction(value)
        return repr(float(frac))
    return str(int(value))


def format_inputs(program: EmittedProgram, rows: Sequence[Mapping[str, Value]]) -> str:
    """One line per step; ``rows`` are keyed by input symbol (``x@in``) or plain name."""
    lines = []
    for row in rows:
        fields = []
        for name, sort in program.inputs:
            value = row[name + "@in"] if name + "@in" in row else row[name]
            fields.append(_format(value, sort))
        lines.append(" ".join(fields) if fields else "tick")
    return "\n".join(lines) + ("\n" if lines else "")


def _parse(token: str, sort: Sort) -> Value:
    if sort is Sort.BOOL:
        return token != "0"
    if sort is Sort.INT:
        return int(token)
    return float(token)  # type: ignore[return-value]


def run_program(
    binary: str, program: EmittedProgram, rows: Sequence[Mapping[str, Value]], timeout: float = 30.0
) -> List[Model]:
    """States printed by the driver: the initial state followed by one per step."""
    proc = subprocess.run(
        [binary],
        input=format_inputs(program, rows),
        capture_output=True,
        text=True,
        timeout=timeout,
        check=False,
    )
    if proc.returncode != 0:
        raise CompilationError(f"{binary} exited with {proc.returncode}", proc.stderr)
    states = []
    for line in proc.stdout.splitlines():
        tokens = line.split()
        if len(tokens) != len(program.observables):
            raise CompilationError(f"unexpected output line {line!r}")
        states.append({name: _parse(tok, sort) for (name, sort), tok in zip(program.observables, tokens)})
    return states


def mismatches(
    program: EmittedProgram,
    expected: Sequence[Mapping[str, Value]],
    actual: Sequence[Mapping[str, Value]],
    tolerance: float = REAL_TOLERANCE,
) -> List[str]:
    """Differences between interpreter states and compiled states, step by step."""
    problems = []
    if len(expected) != len(actual):
        problems.append(f"{len(expected)} interpreter states, {len(actual)} compiled states")
    for step, (want, got) in enumerate(zip(expected, actual)):
        for name, sort in program.observables:
            a, b = want[name], got[name]
            if sort is Sort.REAL:
                if abs(float(Fraction(a)) - float(b)) > tolerance:
                    problems.append(f"step {step}: {name} = {float(Fraction(a))!r} vs {b!r}")
            elif (bool(a) != bool(b)) if sort is Sort.BOOL else (int(a) != int(b)):
                problems.append(f"step {step}: {name} = {a!r} vs {b!r}")
    return problems
