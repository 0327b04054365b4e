"""Outer surface of the package: the command line."""

from .cli import CommandLineApp, RunConfig, build_parser, main

__all__ = ["CommandLineApp", "RunConfig", "build_parser", "main"]
