"""Shared primitives: expressions, SMT-LIB text, solver sessions, configuration."""
