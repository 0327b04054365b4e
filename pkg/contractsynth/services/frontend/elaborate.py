"""Translation of a checked contract into ``A``, ``G_I`` and ``G_T``."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from ...core.errors import AssumptionError, ContractError, InitializationError, RejectedInputError
from ...core.logic import (
    Add,
    And,
    Cmp,
    Expr,
    FIte,
    Formula,
    Iff,
    Implies,
    IntConst,
    IntDiv,
    Ite,
    Neg,
    Not,
    Or,
    RealConst,
    Scale,
    Sort,
    Sub,
    Term,
    Var,
    conj,
    const,
    equals,
    evaluate,
    free_symbols,
    simplify,
)
from .ast import (
    Arrow,
    Binary,
    ContractAst,
    Ident,
    IfThenElse,
    Lit,
    Node,
    Pos,
    Pre,
    Unary,
    identifiers,
    pre_arguments,
)
from .parser import parse_contract
from .problem import INPUT_SUFFIX, NEXT_SUFFIX, SynthesisProblem, input_var, next_var

logger = logging.getLogger(__name__)

_CMP = {"=": "=", "<>": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


class _DeadPre(Exception):
    """A ``pre`` was reached at the initial instant."""


class _Translator:
    """Maps syntax to logic for one evaluation context.

    Modes: ``trans`` (current values are successors), ``prev`` (inside ``pre``),
    ``init`` (initial instant), ``assume`` and ``assume_init`` (assertions).
    """

    def __init__(self, sorts: Dict[str, Sort], inputs: Set[str], mode: str):
        self.sorts = sorts
        self.inputs = inputs
        self.mode = mode

    def with_mode(self, mode: str) -> "_Translator":
        return _Translator(self.sorts, self.inputs, mode)

    def __call__(self, node: Node) -> Expr:
        try:
            return self._translate(node)
        except (ContractError, _DeadPre):
            raise
        except RejectedInputError as exc:
            pos = getattr(node, "pos", Pos())
            raise ContractError(f"type error: {exc}", pos.line, pos.column) from exc

    def _translate(self, node: Node) -> Expr:
        if isinstance(node, Lit):
            return const(node.value, node.sort)
        if isinstance(node, Ident):
            return self._ident(node)
        if isinstance(node, Pre):
            if self.mode in ("init", "assume_init"):
                raise _DeadPre()
            if self.mode == "prev":
                raise InitializationError("nested pre is not supported", node.pos.line, node.pos.column)
            return self.with_mode("prev")(node.arg)
        if isinstance(node, Arrow):
            if self.mode == "prev":
                raise InitializationError(
                    "arrow under pre is not supported", node.pos.line, node.pos.column
                )
            if self.mode in ("init", "assume_init"):
                return self(node.first)
            return self(node.then)
        if isinstance(node, IfThenElse):
            cond = self(node.cond)
            then, else_ = _unify(self(node.then), self(node.else_))
            if then.sort is Sort.BOOL:
                return FIte(cond, then, else_)  # type: ignore[arg-type]
            return Ite(cond, then, else_)  # type: ignore[arg-type]
        if isinstance(node, Unary):
            arg = self(node.arg)
            if node.op == "not":
                return Not(arg)  # type: ignore[arg-type]
            if isinstance(arg, IntConst):
                return IntConst(-arg.value)
            if isinstance(arg, RealConst):
                return RealConst(-arg.value)
            return Neg(arg)  # type: ignore[arg-type]
        if isinstance(node, Binary):
            return self._binary(node)
        raise ContractError(f"unsupported expression {node!r}")

    def _ident(self, node: Ident) -> Expr:
        name, sort = node.name, self.sorts[node.name]
        is_input = name in self.inputs
        if self.mode == "trans":
            return input_var(name, sort) if is_input else Var(name + NEXT_SUFFIX, sort)
        if self.mode in ("prev", "init"):
            return Var(name, sort)
        if not is_input:
            raise AssumptionError(
                f"assumption constrains outputs: {name} is not an input",
                node.pos.line,
                node.pos.column,
            )
        return input_var(name, sort) if self.mode == "assume" else Var(name, sort)

    def _binary(self, node: Binary) -> Expr:
        lhs, rhs = self(node.lhs), self(node.rhs)
        op = node.op
        if op == "and":
            return And((lhs, rhs))  # type: ignore[arg-type]
        if op == "or":
            return Or((lhs, rhs))  # type: ignore[arg-type]
        if op == "=>":
            return Implies(lhs, rhs)  # type: ignore[arg-type]
        if op == "xor":
            return Not(Iff(lhs, rhs))  # type: ignore[arg-type]
        if op in _CMP:
            if lhs.sort is Sort.BOOL or rhs.sort is Sort.BOOL:
                if op not in ("=", "<>"):
                    raise ContractError(f"ordering {op} on booleans", node.pos.line, node.pos.column)
                eq = Iff(lhs, rhs)  # type: ignore[arg-type]
                return eq if op == "=" else Not(eq)
            lhs, rhs = _unify(lhs, rhs)
            return Cmp(_CMP[op], lhs, rhs)  # type: ignore[arg-type]
        lhs, rhs = _unify(lhs, rhs)
        if op == "+":
            return Add((lhs, rhs))  # type: ignore[arg-type]
        if op == "-":
            return Sub(lhs, rhs)  # type: ignore[arg-type]
        if op == "*":
            return _product(lhs, rhs, node.pos)  # type: ignore[arg-type]
        if op == "/":
            divisor = _constant_value(rhs)  # type: ignore[arg-type]
            if lhs.sort is not Sort.REAL or divisor is None or divisor == 0:
                raise ContractError(
                    "division needs a real dividend and a nonzero constant divisor",
                    node.pos.line,
                    node.pos.column,
                )
            return Scale(1 / divisor, lhs)  # type: ignore[arg-type]
        if op == "div":
            divisor = _constant_value(rhs)  # type: ignore[arg-type]
            if lhs.sort is not Sort.INT or divisor is None or divisor <= 0:
                raise ContractError(
                    "div needs an integer dividend and a positive constant divisor",
                    node.pos.line,
                    node.pos.column,
                )
            return IntDiv(lhs, int(divisor))  # type: ignore[arg-type]
        raise ContractError(f"unknown operator {op}", node.pos.line, node.pos.column)


def _constant_value(t: Term) -> Optional[Fraction]:
    if free_symbols(t):
        return None
    return Fraction(evaluate(t, {}))  # type: ignore[arg-type]


def _lift(t: Expr) -> Expr:
    if t.sort is Sort.INT and not free_symbols(t):
        return RealConst(Fraction(evaluate(t, {})))  # type: ignore[arg-type]
    return t


def _unify(a: Expr, b: Expr) -> Tuple[Expr, Expr]:
    """Integer constant expressions meeting a real operand become reals."""
    if a.sort is Sort.REAL and b.sort is Sort.INT:
        return a, _lift(b)
    if b.sort is Sort.REAL and a.sort is Sort.INT:
        return _lift(a), b
    return a, b


def _product(lhs: Term, rhs: Term, pos: Pos) -> Term:
    left, right = _constant_value(lhs), _constant_value(rhs)
    if left is not None and right is not None:
        return simplify(Scale(left, rhs))  # type: ignore[return-value]
    if left is not None:
        return Scale(left, rhs)
    if right is not None:
        return Scale(right, lhs)
    raise ContractError("nonlinear multiplication", pos.line, pos.column)


def _assign(target: Var, value: Expr) -> Formula:
    if target.sort is Sort.REAL:
        value = _lift(value)
    return equals(target, value)


# --------------------------------------------------------------------------- inlining


def _inline_candidates(ast: ContractAst) -> Set[str]:
    sorts = ast.sorts()
    pre_mentions: Set[str] = set()
    for node in [eq.rhs for eq in ast.equations] + list(ast.assertions):
        for arg in pre_arguments(node):
            pre_mentions.update(i.name for i in identifiers(arg))
    return {
        eq.name
        for eq in ast.equations
        if sorts[eq.name] is Sort.BOOL and eq.name not in pre_mentions
    }


class _Expander:
    def __init__(self, ast: ContractAst, inlined: Set[str]):
        self.rhs = {eq.name: eq.rhs for eq in ast.equations}
        self.inlined = inlined
        self._done: Dict[str, Node] = {}

    def definition(self, name: str, stack: Tuple[str, ...] = ()) -> Node:
        if name in self._done:
            return self._done[name]
        if name in stack:
            cycle = " -> ".join(stack + (name,))
            raise ContractError(f"instantaneous dependency cycle: {cycle}")
        expanded = self.expand(self.rhs[name], stack + (name,))
        self._done[name] = expanded
        return expanded

    def expand(self, node: Node, stack: Tuple[str, ...] = ()) -> Node:
        if isinstance(node, Ident):
            if node.name in self.inlined:
                return self.definition(node.name, stack)
            return node
        if isinstance(node, Lit):
            return node
        if isinstance(node, Pre):
            return Pre(self.expand(node.arg, stack), node.pos)
        if isinstance(node, Arrow):
            return Arrow(self.expand(node.first, stack), self.expand(node.then, stack), node.pos)
        if isinstance(node, IfThenElse):
            return IfThenElse(
                self.expand(node.cond, stack),
                self.expand(node.then, stack),
                self.expand(node.else_, stack),
                node.pos,
            )
        if isinstance(node, Unary):
            return Unary(node.op, self.expand(node.arg, stack), node.pos)
        if isinstance(node, Binary):
            return Binary(node.op, self.expand(node.lhs, stack), self.expand(node.rhs, stack), node.pos)
        return node


# --------------------------------------------------------------------------- elaboration


def elaborate(ast: ContractAst, inline: bool = True) -> SynthesisProblem:
    """Build ``A(s, i)``, ``G_I(s)`` and ``G_T(s, i, s')`` for a checked contract.

    With ``inline`` set, boolean variables defined by an equation and never
    read through ``pre`` are substituted by their definitions; they leave the
    state vector but stay observable through ``derived_init``/``derived_trans``.
    """
    sorts = ast.sorts()
    input_names = set(ast.realizable)
    equations = ast.equation_map()
    inlined = _inline_candidates(ast) if inline else set()
    expander = _Expander(ast, inlined)
    for name in sorted(inlined):
        expander.definition(name)

    trans = _Translator(sorts, input_names, "trans")
    init = _Translator(sorts, input_names, "init")
    assume = _Translator(sorts, input_names, "assume")
    assume_init = _Translator(sorts, input_names, "assume_init")

    inputs = tuple(input_var(d.name, d.sort) for d in ast.inputs)
    state = tuple(Var(d.name, d.sort) for d in ast.decls if d.name not in inlined)
    derived = tuple(Var(d.name, d.sort) for d in ast.decls if d.name in inlined)

    assumptions: List[Formula] = [assume(node) for node in ast.assertions]  # type: ignore[misc]
    initial_assumptions: List[Formula] = []
    for node in ast.assertions:
        try:
            initial_assumptions.append(assume_init(node))  # type: ignore[arg-type]
        except _DeadPre:
            continue

    g_t: List[Formula] = []
    g_i: List[Formula] = []
    for decl in ast.decls:
        eq = equations.get(decl.name)
        if eq is None or decl.name in inlined:
            continue
        var = Var(decl.name, decl.sort)
        rhs = expander.expand(eq.rhs)
        g_t.append(_assign(next_var(var), trans(rhs)))
        g_i.append(_assign(var, init(rhs)))
    for name in ast.properties:
        if name in inlined:
            rhs = expander.definition(name)
            g_t.append(trans(rhs))  # type: ignore[arg-type]
            g_i.append(init(rhs))  # type: ignore[arg-type]
        else:
            g_t.append(Var(name + NEXT_SUFFIX, Sort.BOOL))
            g_i.append(Var(name, Sort.BOOL))
    for var in inputs:
        shadow = Var(var.name[: -len(INPUT_SUFFIX)], var.sort)
        g_t.append(equals(next_var(shadow), var))
    g_i.extend(initial_assumptions)

    derived_init = {}
    derived_trans = {}
    for var in derived:
        rhs = expander.definition(var.name)
        derived_init[var.name] = simplify(init(rhs))
        derived_trans[var.name] = simplify(trans(rhs))

    init_conjuncts, trans_conjuncts = _labelled_conjuncts(
        ast, sorts, input_names, inputs, initial_assumptions
    )

    problem = SynthesisProblem(
        name=ast.name,
        inputs=inputs,
        state=state,
        assumption=simplify(conj(*assumptions)),  # type: ignore[arg-type]
        init=simplify(conj(*g_i)),  # type: ignore[arg-type]
        trans=simplify(conj(*g_t)),  # type: ignore[arg-type]
        sorts=dict(sorts),
        derived=derived,
        derived_init=derived_init,
        derived_trans=derived_trans,
        init_conjuncts=init_conjuncts,
        trans_conjuncts=trans_conjuncts,
        properties=tuple(ast.properties),
    )
    logger.info(
        "elaborated %s: %d inputs, %d state variables, %d inlined",
        ast.name,
        len(inputs),
        len(state),
        len(derived),
    )
    return problem


def _labelled_conjuncts(ast, sorts, input_names, inputs, initial_assumptions):
    """The contract over every variable, without substitution, for conformance checks."""
    trans = _Translator(sorts, input_names, "trans")
    init = _Translator(sorts, input_names, "init")
    init_conjuncts: List[Tuple[str, Formula]] = []
    trans_conjuncts: List[Tuple[str, Formula]] = []
    for eq in ast.equations:
        var = Var(eq.name, sorts[eq.name])
        init_conjuncts.append((f"equation {eq.name}", _assign(var, init(eq.rhs))))
        trans_conjuncts.append((f"equation {eq.name}", _assign(next_var(var), trans(eq.rhs))))
    for name in ast.properties:
        init_conjuncts.append((f"property {name}", Var(name, Sort.BOOL)))
        trans_conjuncts.append((f"property {name}", Var(name + NEXT_SUFFIX, Sort.BOOL)))
    for var in inputs:
        shadow = Var(var.name[: -len(INPUT_SUFFIX)], var.sort)
        trans_conjuncts.append((f"input {shadow.name}", equals(next_var(shadow), var)))
    for index, formula in enumerate(initial_assumptions):
        init_conjuncts.append((f"assumption {index}", formula))
    return tuple(init_conjuncts), tuple(trans_conjuncts)


def load_problem(text: str, inline: bool = True) -> SynthesisProblem:
    return elaborate(parse_contract(text), inline=inline)
