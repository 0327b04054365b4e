"""Exception hierarchy shared by every stage of the synthesis pipeline."""

from __future__ import annotations

from typing import Any, Mapping, Optional


class SynthError(Exception):
    """Base class for all errors raised by contractsynth."""


class RejectedInputError(SynthError):
    """An input violates a documented precondition (sort mismatch, unbound symbol, ...)."""


class ContractError(RejectedInputError):
    """A contract could not be parsed or elaborated."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ContractSyntaxError(ContractError):
    pass


class DuplicateDefinitionError(ContractError):
    pass


class UnknownIdentifierError(ContractError):
    pass


class InitializationError(ContractError):
    """A `pre` is not guarded by the right arm of an arrow."""


class AssumptionError(ContractError):
    """An assertion mentions the current value of a non-input variable."""


class SolverError(SynthError):
    """The SMT solver process misbehaved at the protocol level."""


class SolverNotFoundError(SolverError):
    pass


class InternalError(SynthError):
    """An internal contract between pipeline stages was violated."""


class CoverageHoleError(SynthError):
    """No Skolem case applies to a reachable valuation."""

    def __init__(self, message: str, valuation: Mapping[str, Any]):
        super().__init__(message)
        self.valuation = dict(valuation)


class ConfigError(SynthError):
    pass
