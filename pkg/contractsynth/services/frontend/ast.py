"""Syntax tree of the contract language."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple, Union

from ...core.logic import Sort


@dataclass(frozen=True)
class Pos:
    line: Optional[int] = None
    column: Optional[int] = None


@dataclass(frozen=True)
class Lit:
    value: Union[bool, int, Fraction]
    sort: Sort
    pos: Pos = field(default=Pos(), compare=False)


@dataclass(frozen=True)
class Ident:
    name: str
    pos: Pos = field(default=Pos(), compare=False)


@dataclass(frozen=True)
class Pre:
    arg: "Node"
    pos: Pos = field(default=Pos(), compare=False)


@dataclass(frozen=True)
class Arrow:
    first: "Node"
    then: "Node"
    pos: Pos = field(default=Pos(), compare=False)


@dataclass(frozen=True)
class IfThenElse:
    cond: "Node"
    then: "Node"
    else_: "Node"
    pos: Pos = field(default=Pos(), compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "not"
    arg: "Node"
    pos: Pos = field(default=Pos(), compare=False)


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / div = <> < <= > >= and or xor =>
    lhs: "Node"
    rhs: "Node"
    pos: Pos = field(default=Pos(), compare=False)


Node = Union[Lit, Ident, Pre, Arrow, IfThenElse, Unary, Binary]


@dataclass(frozen=True)
class Decl:
    name: str
    sort: Sort
    kind: str  # "param", "return" or "local"
    pos: Pos = field(default=Pos(), compare=False)


@dataclass(frozen=True)
class Equation:
    name: str
    rhs: Node
    pos: Pos = field(default=Pos(), compare=False)


@dataclass
class ContractAst:
    name: str
    decls: List[Decl] = field(default_factory=list)
    equations: List[Equation] = field(default_factory=list)
    assertions: List[Node] = field(default_factory=list)
    properties: List[str] = field(default_factory=list)
    realizable: List[str] = field(default_factory=list)

    @property
    def inputs(self) -> List[Decl]:
        chosen = set(self.realizable)
        return [d for d in self.decls if d.name in chosen]

    @property
    def locals(self) -> List[Decl]:
        return [d for d in self.decls if d.kind == "local"]

    @property
    def outputs(self) -> List[Decl]:
        names = {d.name for d in self.inputs}
        return [d for d in self.decls if d.name not in names]

    def sorts(self) -> Dict[str, Sort]:
        return {d.name: d.sort for d in self.decls}

    def equation_map(self) -> Dict[str, Equation]:
        return {eq.name: eq for eq in self.equations}


def children(node: Node) -> Tuple[Node, ...]:
    if isinstance(node, (Pre, Unary)):
        return (node.arg,)
    if isinstance(node, Arrow):
        return (node.first, node.then)
    if isinstance(node, IfThenElse):
        return (node.cond, node.then, node.else_)
    if isinstance(node, Binary):
        return (node.lhs, node.rhs)
    return ()


def walk(node: Node) -> Iterator[Node]:
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(children(current)))


def identifiers(node: Node) -> List[Ident]:
    return [n for n in walk(node) if isinstance(n, Ident)]


def pre_arguments(node: Node) -> List[Node]:
    return [n.arg for n in walk(node) if isinstance(n, Pre)]
