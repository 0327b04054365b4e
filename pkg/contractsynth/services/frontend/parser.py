"""Parser and static checks for the contract language."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import List, Set

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from ...core.errors import (
    ContractError,
    ContractSyntaxError,
    DuplicateDefinitionError,
    InitializationError,
    UnknownIdentifierError,
)
from ...core.logic import Sort
from .ast import (
    Arrow,
    Binary,
    ContractAst,
    Decl,
    Equation,
    Ident,
    IfThenElse,
    Lit,
    Node,
    Pos,
    Pre,
    Unary,
    children,
    identifiers,
)

logger = logging.getLogger(__name__)

CONTRACT_GRAMMAR = r"""
    start: "node" NAME "(" in_params ")" "returns" "(" out_params ")" ";" local_vars "let" _item* "tel" (";" | ".")?

    in_params: param_list?
    out_params: param_list?
    param_list: param_group (";" param_group)* ";"?
    local_vars: ("var" (param_group ";")+)?
    param_group: NAME ("," NAME)* ":" type
    type: "int" -> int_type
        | "real" -> real_type
        | "bool" -> bool_type

    _item: equation | assertion | property_decl | realizable_decl
    equation: NAME "=" expr ";"
    assertion: "assert" expr ";"
    property_decl: PROPERTY NAME ("," NAME)* ";"
    realizable_decl: REALIZABLE NAME ("," NAME)* ";"

    ?expr: "if" expr "then" expr "else" expr -> ite
         | implication "->" expr -> arrow
         | implication
    ?implication: disjunction "=>" implication -> implies
                | disjunction
    ?disjunction: disjunction "or" conjunction -> or_
                | disjunction "xor" conjunction -> xor
                | conjunction
    ?conjunction: conjunction "and" negation -> and_
                | negation
    ?negation: "not" negation -> not_
             | comparison
    ?comparison: sum "=" sum -> eq
               | sum "<>" sum -> ne
               | sum "<" sum -> lt
               | sum "<=" sum -> le
               | sum ">" sum -> gt
               | sum ">=" sum -> ge
               | sum
    ?sum: sum "+" product -> add
        | sum "-" product -> sub
        | product
    ?product: product "*" unary -> mul
            | product "/" unary -> div
            | product "div" unary -> intdiv
            | unary
    ?unary: "-" unary -> neg
          | "pre" unary -> pre
          | atom
    ?atom: INT -> int_lit
         | DECIMAL -> real_lit
         | "true" -> true_lit
         | "false" -> false_lit
         | NAME -> ident
         | "(" expr ")"

    PROPERTY.3: "--%PROPERTY"
    REALIZABLE.3: "--%REALIZABLE"
    COMMENT.2: /--(?!%PROPERTY|%REALIZABLE)[^\n]*/
    BLOCK_COMMENT.2: /\(\*(.|\n)*?\*\)/ | /\/\*(.|\n)*?\*\//
    DECIMAL.2: /[0-9]+\.[0-9]+([eE][+-]?[0-9]+)?/
    INT: /[0-9]+/
    NAME: /[A-Za-z_][A-Za-z0-9_]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
    %ignore BLOCK_COMMENT
"""

_parser = Lark(CONTRACT_GRAMMAR, parser="lalr", propagate_positions=True)


def _pos(meta) -> Pos:
    if getattr(meta, "empty", True):
        return Pos()
    return Pos(meta.line, meta.column)


def _tok_pos(token: Token) -> Pos:
    return Pos(token.line, token.column)


def _binary(op: str):
    def build(self, meta, items):
        return Binary(op, items[0], items[1], _pos(meta))

    return build


@v_args(meta=True)
class _AstBuilder(Transformer):
    def start(self, meta, items):
        name, in_params, out_params, local_vars, *body = items
        ast = ContractAst(str(name))
        for kind, groups in (("param", in_params), ("return", out_params), ("local", local_vars)):
            for names, sort in groups:
                ast.decls.extend(Decl(str(n), sort, kind, _tok_pos(n)) for n in names)
        for item in body:
            tag, payload = item
            if tag == "equation":
                ast.equations.append(payload)
            elif tag == "assert":
                ast.assertions.append(payload)
            elif tag == "property":
                ast.properties.extend(payload)
            else:
                ast.realizable.extend(payload)
        return ast

    def in_params(self, meta, items):
        return items[0] if items else []

    out_params = in_params

    def param_list(self, meta, items):
        return list(items)

    def local_vars(self, meta, items):
        return list(items)

    def param_group(self, meta, items):
        return list(items[:-1]), items[-1]

    def int_type(self, meta, items):
        return Sort.INT

    def real_type(self, meta, items):
        return Sort.REAL

    def bool_type(self, meta, items):
        return Sort.BOOL

    def equation(self, meta, items):
        name, rhs = items
        return "equation", Equation(str(name), rhs, _tok_pos(name))

    def assertion(self, meta, items):
        return "assert", items[0]

    def property_decl(self, meta, items):
        return "property", [(str(t), _tok_pos(t)) for t in items[1:]]

    def realizable_decl(self, meta, items):
        return "realizable", [(str(t), _tok_pos(t)) for t in items[1:]]

    def ite(self, meta, items):
        return IfThenElse(items[0], items[1], items[2], _pos(meta))

    def arrow(self, meta, items):
        return Arrow(items[0], items[1], _pos(meta))

    implies = _binary("=>")
    or_ = _binary("or")
    xor = _binary("xor")
    and_ = _binary("and")
    eq = _binary("=")
    ne = _binary("<>")
    lt = _binary("<")
    le = _binary("<=")
    gt = _binary(">")
    ge = _binary(">=")
    add = _binary("+")
    sub = _binary("-")
    mul = _binary("*")
    div = _binary("/")
    intdiv = _binary("div")

    def not_(self, meta, items):
        return Unary("not", items[0], _pos(meta))

    def neg(self, meta, items):
        return Unary("-", items[0], _pos(meta))

    def pre(self, meta, items):
        return Pre(items[0], _pos(meta))

    def int_lit(self, meta, items):
        return Lit(int(items[0]), Sort.INT, _tok_pos(items[0]))

    def real_lit(self, meta, items):
        return Lit(Fraction(str(items[0])), Sort.REAL, _tok_pos(items[0]))

    def true_lit(self, meta, items):
        return Lit(True, Sort.BOOL, _pos(meta))

    def false_lit(self, meta, items):
        return Lit(False, Sort.BOOL, _pos(meta))

    def ident(self, meta, items):
        return Ident(str(items[0]), _tok_pos(items[0]))


def parse_contract(text: str) -> ContractAst:
    """Parse ``text`` and run the static checks; the result is ready for elaboration."""
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as exc:
        line = exc.line if getattr(exc, "line", -1) not in (None, -1) else None
        column = exc.column if line is not None else None
        raise ContractSyntaxError(f"syntax error: {_describe(exc)}", line, column) from exc
    try:
        raw = _AstBuilder().transform(tree)
    except VisitError as exc:
        raise ContractSyntaxError(f"malformed contract: {exc.orig_exc}") from exc
    ast = _check(raw)
    logger.debug(
        "parsed node %s: %d declarations, %d equations, %d assertions",
        ast.name,
        len(ast.decls),
        len(ast.equations),
        len(ast.assertions),
    )
    return ast


def _describe(exc: UnexpectedInput) -> str:
    token = getattr(exc, "token", None)
    if token is not None:
        if token.type == "$END":
            return "unexpected end of input"
        return f"unexpected {str(token)!r}"
    char = getattr(exc, "char", None)
    if char is not None:
        return f"unexpected character {char!r}"
    return exc.__class__.__name__


def _check(ast: ContractAst) -> ContractAst:
    declared = {}
    for decl in ast.decls:
        if decl.name in declared:
            raise DuplicateDefinitionError(
                f"variable {decl.name} declared twice", decl.pos.line, decl.pos.column
            )
        declared[decl.name] = decl

    defined: Set[str] = set()
    for eq in ast.equations:
        if eq.name not in declared:
            raise UnknownIdentifierError(
                f"equation for undeclared variable {eq.name}", eq.pos.line, eq.pos.column
            )
        if eq.name in defined:
            raise DuplicateDefinitionError(
                f"variable {eq.name} defined twice", eq.pos.line, eq.pos.column
            )
        defined.add(eq.name)
        _check_identifiers(eq.rhs, declared)
        _check_initialization(eq.rhs, guarded=False, for_equation=True)
    for node in ast.assertions:
        _check_identifiers(node, declared)
        _check_initialization(node, guarded=False, for_equation=False)

    properties: List[str] = []
    for name, pos in ast.properties:  # type: ignore[misc]
        if name not in declared:
            raise UnknownIdentifierError(f"unknown property {name}", pos.line, pos.column)
        if declared[name].sort is not Sort.BOOL:
            raise ContractError(f"property {name} must be boolean", pos.line, pos.column)
        if name not in properties:
            properties.append(name)
    realizable: List[str] = []
    for name, pos in ast.realizable:  # type: ignore[misc]
        if name not in declared:
            raise UnknownIdentifierError(f"unknown input {name}", pos.line, pos.column)
        if name in defined:
            raise ContractError(f"input {name} is defined by an equation", pos.line, pos.column)
        if name not in realizable:
            realizable.append(name)
    ast.properties = properties
    ast.realizable = realizable
    if not realizable:
        # Without an annotation every undefined node parameter is an input.
        ast.realizable = [d.name for d in ast.decls if d.kind == "param" and d.name not in defined]
    return ast


def _check_identifiers(node: Node, declared) -> None:
    for ident in identifiers(node):
        if ident.name not in declared:
            raise UnknownIdentifierError(
                f"unknown identifier {ident.name}", ident.pos.line, ident.pos.column
            )


def _check_initialization(node: Node, guarded: bool, for_equation: bool) -> None:
    if isinstance(node, Arrow):
        _check_initialization(node.first, guarded, for_equation)
        _check_initialization(node.then, True, for_equation)
        return
    if isinstance(node, Pre):
        if for_equation and not guarded:
            raise InitializationError(
                "pre is not guarded by the right arm of an arrow", node.pos.line, node.pos.column
            )
        for inner in _subtree(node.arg):
            if isinstance(inner, Pre):
                raise InitializationError(
                    "nested pre is not supported", inner.pos.line, inner.pos.column
                )
            if isinstance(inner, Arrow):
                raise InitializationError(
                    "arrow under pre is not supported", inner.pos.line, inner.pos.column
                )
        return
    for child in children(node):
        _check_initialization(child, guarded, for_equation)


def _subtree(node: Node):
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(children(current))
