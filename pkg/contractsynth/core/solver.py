"""Incremental SMT-LIB2 session over an external solver process."""

from __future__ import annotations

import logging
import os
import selectors
import subprocess
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Set, Union

from .errors import RejectedInputError, SolverError
from .logic import Formula, Model, Sort, Var, free_symbols, negate, zero_value
from .smtlib import declaration, parse_model, read_sexpr, to_smtlib

logger = logging.getLogger(__name__)

# Non-check commands should answer immediately; this only guards against a wedged process.
_COMMAND_GRACE_S = 10.0


@dataclass(frozen=True)
class Sat:
    model: Model = field(default_factory=dict)


@dataclass(frozen=True)
class Unsat:
    pass


@dataclass(frozen=True)
class Unknown:
    reason: str


SatResult = Union[Sat, Unsat, Unknown]


def logic_for(sorts: Iterable[Sort]) -> str:
    kinds = {s for s in sorts if s is not Sort.BOOL}
    if kinds == {Sort.INT}:
        return "QF_LIA"
    if kinds <= {Sort.REAL}:
        return "QF_LRA"
    return "ALL"


class _ProcessGone(Exception):
    pass


class _Timeout(Exception):
    pass


class SolverSession:
    """One solver process with scoped declarations and assertions.

    Failures of the process never raise out of :meth:`check_sat`; they turn
    into :class:`Unknown` results and the session stays dead afterwards.
    """

    def __init__(
        self,
        command: List[str],
        logic: str = "ALL",
        timeout_ms: int = 30000,
        seed: int = 0,
        name: str = "solver",
    ):
        self.command = list(command)
        self.logic = logic
        self.timeout_ms = timeout_ms
        self.seed = seed
        self.name = name
        self.sorts: Dict[str, Sort] = {}
        self._scopes: List[Set[str]] = [set()]
        self._asserted: List[List[Formula]] = [[]]
        self._buffer = b""
        self._dead_reason: Optional[str] = None
        self.queries = 0
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as exc:
            raise SolverError(f"could not start solver {self.command[0]!r}: {exc}") from exc
        self._selector = selectors.DefaultSelector()
        self._selector.register(self._proc.stdout, selectors.EVENT_READ)
        self._handshake()
        self._command("(set-option :produce-models true)")
        self._command(f"(set-option :random-seed {seed})", tolerate_unsupported=True)
        self._command(f"(set-logic {logic})")
        logger.debug("%s: started %s (logic %s)", name, " ".join(self.command), logic)

    # ------------------------------------------------------------------ lifecycle

    @property
    def alive(self) -> bool:
        return self._dead_reason is None and self._proc.poll() is None

    @property
    def depth(self) -> int:
        return len(self._scopes) - 1

    def kill(self, reason: str = "process terminated") -> None:
        if self._dead_reason is None:
            self._dead_reason = reason
        if self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()
        self._close_pipes()

    def close(self) -> None:
        if self._dead_reason is None and self._proc.poll() is None:
            try:
                self._write("(exit)")
                self._proc.wait(timeout=2)
            except (OSError, subprocess.TimeoutExpired):
                pass
        self.kill("session closed")

    def _close_pipes(self) -> None:
        try:
            self._selector.close()
        except (OSError, ValueError):
            pass
        for pipe in (self._proc.stdin, self._proc.stdout):
            try:
                if pipe is not None:
                    pipe.close()
            except OSError:
                pass

    def __enter__(self) -> "SolverSession":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    # ------------------------------------------------------------------ protocol

    def _write(self, text: str) -> None:
        assert self._proc.stdin is not None
        self._proc.stdin.write(text.encode() + b"\n")
        self._proc.stdin.flush()

    def _handshake(self) -> None:
        # Solvers differ on whether the command enabling print-success is itself acknowledged.
        logger.debug("%s <- (set-option :print-success true)", self.name)
        try:
            self._write("(set-option :print-success true)")
            self._write('(echo "ready")')
            deadline = time.monotonic() + _COMMAND_GRACE_S
            while True:
                reply = self._read_response(deadline)
                if reply.strip('"') == "ready":
                    return
                if reply not in ("success", "unsupported"):
                    raise _ProcessGone(f"unexpected reply {reply!r}")
        except (OSError, _ProcessGone, _Timeout) as exc:
            self.kill()
            raise SolverError(f"{self.name}: solver handshake failed: {exc}") from exc

    def _command(self, text: str, tolerate_unsupported: bool = False) -> None:
        if self._dead_reason is not None:
            raise SolverError(f"{self.name}: {self._dead_reason}")
        logger.debug("%s <- %s", self.name, text)
        try:
            self._write(text)
            reply = self._read_response(time.monotonic() + _COMMAND_GRACE_S)
        except (OSError, _ProcessGone, _Timeout) as exc:
            self.kill()
            raise SolverError(f"{self.name}: {exc or 'process terminated'}") from exc
        if reply == "success" or (tolerate_unsupported and reply == "unsupported"):
            return
        raise SolverError(f"{self.name}: solver rejected {text!r}: {reply}")

    def _query(self, text: str, deadline: float) -> str:
        logger.debug("%s <- %s", self.name, text)
        self._write(text)
        return self._read_response(deadline)

    def _read_response(self, deadline: float) -> str:
        while True:
            response = self._take_response()
            if response is not None:
                shown = response if len(response) < 400 else response[:400] + " ..."
                logger.debug("%s -> %s", self.name, shown)
                return response
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise _Timeout("timeout")
            if not self._selector.select(timeout=remaining):
                continue
            assert self._proc.stdout is not None
            chunk = os.read(self._proc.stdout.fileno(), 65536)
            if not chunk:
                raise _ProcessGone("process terminated")
            self._buffer += chunk

    def _take_response(self) -> Optional[str]:
        data = self._buffer
        start = 0
        while start < len(data) and data[start : start + 1].isspace():
            start += 1
        if start == len(data):
            return None
        if data[start : start + 1] != b"(":
            end = start
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            if end == len(data):
                return None
            self._buffer = data[end:]
            return data[start:end].decode()
        depth = 0
        quote: Optional[bytes] = None
        for pos in range(start, len(data)):
            ch = data[pos : pos + 1]
            if quote is not None:
                if ch == quote:
                    quote = None
                continue
            if ch in (b'"', b"|"):
                quote = ch
            elif ch == b"(":
                depth += 1
            elif ch == b")":
                depth -= 1
                if depth == 0:
                    self._buffer = data[pos + 1 :]
                    return data[start : pos + 1].decode()
        return None

    # ------------------------------------------------------------------ scopes

    def is_declared(self, name: str) -> bool:
        return any(name in scope for scope in self._scopes)

    def declare(self, var: Var) -> None:
        if self.is_declared(var.name):
            raise RejectedInputError(f"symbol {var.name} already declared in an open scope")
        self._command(declaration(var))
        self._scopes[-1].add(var.name)
        self.sorts[var.name] = var.sort

    def ensure_declared(self, variables: Iterable[Var]) -> None:
        for var in sorted(set(variables), key=lambda v: v.name):
            if not self.is_declared(var.name):
                self.declare(var)
            elif self.sorts[var.name] is not var.sort:
                raise RejectedInputError(
                    f"symbol {var.name} declared as {self.sorts[var.name].value}, used as {var.sort.value}"
                )

    def push(self) -> None:
        self._command("(push 1)")
        self._scopes.append(set())
        self._asserted.append([])

    def pop(self) -> None:
        if self.depth == 0:
            raise RejectedInputError("pop at depth 0")
        self._command("(pop 1)")
        for name in self._scopes.pop():
            self.sorts.pop(name, None)
        self._asserted.pop()

    @contextmanager
    def scope(self) -> Iterator["SolverSession"]:
        self.push()
        try:
            yield self
        finally:
            if self.alive:
                self.pop()

    def assert_formula(self, f: Formula) -> None:
        """Assert ``f``; free symbols not yet declared are declared in the current scope."""
        if f.sort is not Sort.BOOL:
            raise RejectedInputError("only formulas can be asserted")
        self.ensure_declared(free_symbols(f))
        self._command(f"(assert {to_smtlib(f)})")
        self._asserted[-1].append(f)

    def assertions(self) -> List[Formula]:
        return [f for frame in self._asserted for f in frame]

    # ------------------------------------------------------------------ queries

    def check_sat(self) -> SatResult:
        if self._dead_reason is not None or self._proc.poll() is not None:
            self._dead_reason = self._dead_reason or "process terminated"
            return Unknown(self._dead_reason)
        self.queries += 1
        deadline = time.monotonic() + self.timeout_ms / 1000.0
        try:
            reply = self._query("(check-sat)", deadline)
            if reply == "unsat":
                return Unsat()
            if reply == "sat":
                text = self._query("(get-model)", time.monotonic() + _COMMAND_GRACE_S)
                return Sat(self._complete(parse_model(text, self.sorts)))
            if reply == "unknown":
                why = self._query("(get-info :reason-unknown)", time.monotonic() + _COMMAND_GRACE_S)
                return Unknown(_reason_text(why))
            logger.warning("%s: unexpected check-sat reply %s", self.name, reply)
            return Unknown(f"protocol error: {reply}")
        except _Timeout:
            logger.warning("%s: query timed out after %d ms", self.name, self.timeout_ms)
            self.kill("timeout")
            return Unknown("timeout")
        except (_ProcessGone, OSError):
            self.kill()
            return Unknown("process terminated")
        except RejectedInputError as exc:
            logger.warning("%s: unreadable model: %s", self.name, exc)
            return Unknown(f"protocol error: {exc}")

    def _complete(self, model: Model) -> Model:
        for name, sort in self.sorts.items():
            model.setdefault(name, zero_value(sort))
        return model

    def check_valid(self, f: Formula) -> Union[bool, Unknown]:
        """``True`` iff ``f`` holds in every model of the current assertions."""
        if not self.alive:
            return Unknown(self._dead_reason or "process terminated")
        with self.scope():
            self.assert_formula(negate(f))
            result = self.check_sat()
        if isinstance(result, Unsat):
            return True
        if isinstance(result, Sat):
            return False
        return result


def _reason_text(reply: str) -> str:
    try:
        sexpr = read_sexpr(reply)
    except RejectedInputError:
        return reply
    if isinstance(sexpr, list) and len(sexpr) == 2 and isinstance(sexpr[1], str):
        return sexpr[1].strip('"')
    return reply
