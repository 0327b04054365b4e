"""C code generation for synthesized implementations."""

from .c_emitter import (
    C_TYPES,
    CExpression,
    EmittedProgram,
    array_names,
    c_identifier,
    emit,
    emit_driver,
)

__all__ = [
    "C_TYPES",
    "CExpression",
    "EmittedProgram",
    "array_names",
    "c_identifier",
    "emit",
    "emit_driver",
]
