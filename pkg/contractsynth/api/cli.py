"""Command line: check, synthesize, certify and simulate contracts.

Exit codes: 0 realizable / pass, 1 unrealizable / fail, 2 unknown,
3 usage, configuration or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, TextIO

from .. import __version__
from ..core.config import Config, resolve_solver_command
from ..core.errors import ConfigError, InternalError, RejectedInputError, SynthError
from ..core.logic import Value
from ..services.codegen import emit
from ..services.frontend import SynthesisProblem, load_problem
from ..services.harness import run_traces
from ..services.realizability import (
    Realizable,
    RealizabilityEngine,
    SynthesisResult,
    Unrealizable,
    initial_state_ok,
)
from ..services.skolem import SkolemBundle, certify_all, dumps, loads

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3

COMMANDS = ("check", "synth", "certify", "simulate")
_SEED_RANGE = (-(2**63), 2**64)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="contractsynth",
        description="Realizability checking and synthesis for assume-guarantee contracts",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("contract", help="contract file (.lus)")
        p.add_argument("--solver", help="SMT solver command line (default: $SYNT_SOLVER, then z3, cvc5)")
        p.add_argument("--max-k", type=int, dest="max_k", help="largest k tried (default 8)")
        p.add_argument(
            "--timeout-ms", type=int, dest="timeout_ms", help="per-query timeout (default 30000)"
        )
        p.add_argument("--check", action="store_true", help="re-check every Skolem with the solver")

    def synthesis(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--dump-queries", dest="dump_queries", metavar="DIR", help="write each check as .smt2"
        )
        p.add_argument(
            "--dump-skolem", dest="dump_skolem", metavar="PATH", help="write the Skolems as JSON"
        )

    check = sub.add_parser("check", help="decide realizability")
    common(check)
    synthesis(check)

    synth = sub.add_parser("synth", help="decide realizability and emit C")
    common(synth)
    synthesis(synth)
    synth.add_argument("--out", metavar="PATH", help="C output file (default: <node>.c)")

    certify = sub.add_parser("certify", help="re-check a Skolem JSON document against its contract")
    common(certify)
    certify.add_argument("skolem", help="Skolem JSON written by --dump-skolem")

    simulate = sub.add_parser("simulate", help="synthesize, then run random conformance traces")
    common(simulate)
    synthesis(simulate)
    simulate.add_argument("--traces", type=int, default=1000)
    simulate.add_argument("--len", type=int, default=50, dest="length")
    simulate.add_argument("--seed", type=int, default=42)
    return parser


@dataclass
class RunConfig:
    """Configuration of one invocation: environment defaults overridden by flags."""

    command: str
    contract: str
    solver: Optional[str] = None
    max_k: int = 8
    timeout_ms: int = 30000
    mbp_cap: int = 512
    inline: bool = True
    check: bool = False
    out: Optional[str] = None
    dump_queries: Optional[str] = None
    dump_skolem: Optional[str] = None
    skolem: Optional[str] = None
    traces: int = 1000
    length: int = 50
    seed: int = 42

    @classmethod
    def from_args(cls, args: argparse.Namespace, cfg: Config) -> "RunConfig":
        run = cls(
            command=args.command,
            contract=args.contract,
            solver=args.solver or cfg.solver_command,
            max_k=cfg.max_k if args.max_k is None else args.max_k,
            timeout_ms=cfg.timeout_ms if args.timeout_ms is None else args.timeout_ms,
            mbp_cap=cfg.mbp_cap,
            inline=cfg.inline,
            check=args.check or cfg.check,
            out=getattr(args, "out", None),
            dump_queries=getattr(args, "dump_queries", None),
            dump_skolem=getattr(args, "dump_skolem", None),
            skolem=getattr(args, "skolem", None),
            traces=getattr(args, "traces", 1000),
            length=getattr(args, "length", 50),
            seed=getattr(args, "seed", 42),
        )
        run.validate()
        return run

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.max_k < 0:
            raise ConfigError("--max-k must be >= 0")
        if self.timeout_ms <= 0:
            raise ConfigError("--timeout-ms must be > 0")
        if self.traces < 0:
            raise ConfigError("--traces must be >= 0")
        if self.length < 0:
            raise ConfigError("--len must be >= 0")
        if not _SEED_RANGE[0] <= self.seed < _SEED_RANGE[1]:
            raise ConfigError("--seed must fit in 64 bits")


def _render_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction) and value.denominator != 1:
        return str(value)
    return str(int(value))


def render_valuation(valuation: Mapping[str, Value]) -> str:
    return ", ".join(f"{name}={_render_value(valuation[name])}" for name in sorted(valuation))


def verdict_line(result: SynthesisResult) -> str:
    if isinstance(result, Realizable):
        return f"REALIZABLE k={result.k}"
    if isinstance(result, Unrealizable):
        if result.stage == "init":
            return f"UNREALIZABLE at depth {result.depth} (no initial state)"
        return f"UNREALIZABLE at depth {result.depth}"
    return f"UNKNOWN ({result.stage}: {result.reason})"


def exit_code(result: SynthesisResult) -> int:
    if isinstance(result, Realizable):
        return EXIT_OK
    if isinstance(result, Unrealizable):
        return EXIT_FAIL
    return EXIT_UNKNOWN


class CommandLineApp:
    def __init__(self, cfg: Config, stdout: Optional[TextIO] = None):
        self.cfg = cfg
        self.stdout = stdout

    def echo(self, text: str) -> None:
        print(text, file=self.stdout or sys.stdout)

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        try:
            args = build_parser().parse_args(argv)
            run = RunConfig.from_args(args, self.cfg)
            return getattr(self, f"cmd_{run.command}")(run)
        except InternalError as exc:
            logger.error("internal error: %s", exc)
            return EXIT_ERROR
        except (SynthError, OSError) as exc:
            logger.error("%s", exc)
            return EXIT_ERROR

    # ----------------------------------------------------------------- helpers

    def load(self, run: RunConfig) -> SynthesisProblem:
        with open(run.contract, "r", encoding="utf-8") as fh:
            text = fh.read()
        problem = load_problem(text, inline=run.inline)
        logger.info(
            "%s: %d inputs, %d state variables, %d derived",
            problem.name,
            len(problem.inputs),
            len(problem.state),
            len(problem.derived),
        )
        return problem

    def engine(self, run: RunConfig, problem: SynthesisProblem) -> RealizabilityEngine:
        return RealizabilityEngine(
            problem,
            resolve_solver_command(run.solver),
            max_k=run.max_k,
            timeout_ms=run.timeout_ms,
            mbp_cap=run.mbp_cap,
            dump_dir=run.dump_queries,
        )

    def synthesize(self, run: RunConfig, problem: SynthesisProblem) -> tuple:
        engine = self.engine(run, problem)
        result = engine.run()
        self.echo(verdict_line(result))
        if isinstance(result, Unrealizable) and result.witness:
            self.echo(f"witness: {render_valuation(result.witness)}")
        code = exit_code(result)
        if isinstance(result, Realizable):
            if run.dump_skolem:
                bundle = SkolemBundle.from_result(problem.name, problem.state, result)
                self.write(run.dump_skolem, dumps(bundle))
            if run.check:
                report = engine.certify(result)
                self.echo(report.to_text())
                if not report.ok:
                    code = EXIT_FAIL
        return engine, result, code

    def write(self, path: str, text: str) -> None:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        logger.info("wrote %s", path)

    # ---------------------------------------------------------------- commands

    def cmd_check(self, run: RunConfig) -> int:
        _, _, code = self.synthesize(run, self.load(run))
        return code

    def cmd_synth(self, run: RunConfig) -> int:
        problem = self.load(run)
        _, result, code = self.synthesize(run, problem)
        if isinstance(result, Realizable):
            program = emit(problem, result)
            self.write(run.out or f"{program.node}.c", program.source)
        return code

    def cmd_certify(self, run: RunConfig) -> int:
        problem = self.load(run)
        assert run.skolem is not None
        with open(run.skolem, "r", encoding="utf-8") as fh:
            bundle = loads(fh.read())
        if bundle.contract != problem.name:
            raise RejectedInputError(
                f"Skolems were synthesized for {bundle.contract!r}, not {problem.name!r}"
            )
        engine = self.engine(run, problem)
        checks = engine.rebuild_checks(bundle.k)
        with engine.session("certify") as session:
            init_ok = initial_state_ok(problem, bundle.init_model)
            report = certify_all(session, checks, bundle.skolems, init_ok)
        self.echo(report.to_text())
        return EXIT_OK if report.ok else EXIT_FAIL

    def cmd_simulate(self, run: RunConfig) -> int:
        problem = self.load(run)
        engine, result, code = self.synthesize(run, problem)
        if not isinstance(result, Realizable) or code != EXIT_OK:
            return code
        with engine.session("sampler") as session:
            report = run_traces(problem, result, run.traces, run.length, run.seed, session)
        self.echo(report.to_text())
        return EXIT_OK if report.passed else EXIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    from .. import create_app

    try:
        app = create_app()
    except ConfigError as exc:
        logging.basicConfig()
        logger.error("%s", exc)
        return EXIT_ERROR
    return app.run(argv)


if __name__ == "__main__":
    sys.exit(main())
