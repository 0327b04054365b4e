"""C99 rendering of a synthesized implementation.

Every contract variable becomes a global array of ``k + 1`` slots. The init
function fills slot 0 from the initial model; the first ``k`` steps run the
base cascades and fill slots ``1..k``; afterwards every step runs the extend
cascade and shifts the arrays left by one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Set, Tuple

from ... import __version__
from ...core.errors import InternalError
from ...core.logic import (
    Add,
    And,
    BoolConst,
    Cmp,
    Expr,
    FIte,
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
    Value,
    Var,
)
from ..frontend.problem import SynthesisProblem, parse_symbol
from ..skolem.types import GuardedSkolem

logger = logging.getLogger(__name__)

C_TYPES = {Sort.INT: "int64_t", Sort.REAL: "double", Sort.BOOL: "int"}

_C_RESERVED = {
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "main", "abort", "printf", "scanf",
    "stdin", "stdout", "stderr", "exit", "int64_t", "random", "rand", "srand", "time", "remove",
    "rename", "free", "abs", "labs", "div", "ldiv", "system", "getchar", "putchar", "puts", "atoi",
    "atof", "malloc", "calloc", "realloc", "getenv", "qsort", "bsearch", "fopen", "fclose", "out",
    "at", "j",
}


def c_identifier(name: str) -> str:
    return name + "_" if name in _C_RESERVED else name


def generated_identifiers(p: SynthesisProblem, node: str) -> Set[str]:
    """Identifiers the emitted program declares for itself."""
    names = {f"{node}_{suffix}" for suffix in ("init", "step", "print", "fail", "steps")}
    names.update({f"{node.upper()}_K", "synt_floordiv"})
    for var in p.inputs:
        shadow = p.shadow_of(var).name
        names.update({f"in_{shadow}", f"rc_{shadow}"})
    names.update(f"next_{var.name}" for var in p.observables)
    return names


def array_names(p: SynthesisProblem, node: str) -> Dict[str, str]:
    """C array of every contract variable; clashing names get ``_`` suffixes until unique."""
    taken = _C_RESERVED | generated_identifiers(p, node)
    names = {v.name: v.name for v in p.observables if v.name not in taken}
    taken |= set(names)
    for var in p.observables:
        if var.name in names:
            continue
        name = var.name + "_"
        while name in taken:
            name += "_"
        taken.add(name)
        names[var.name] = name
    return names


@dataclass
class EmittedProgram:
    source: str
    node: str
    k: int
    inputs: List[Tuple[str, Sort]] = field(default_factory=list)
    observables: List[Tuple[str, Sort]] = field(default_factory=list)

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.source)
        logger.info("wrote %s (%d bytes)", path, len(self.source))


# --------------------------------------------------------------------------- expressions


def _real_literal(value: Fraction) -> str:
    if value.denominator == 1:
        text = f"{abs(value.numerator)}.0"
    else:
        text = f"({abs(value.numerator)}.0 / {value.denominator}.0)"
    return f"(-{text})" if value < 0 else text


def _int_literal(value: int) -> str:
    return f"INT64_C({value})" if value >= 0 else f"(-INT64_C({-value}))"


class CExpression:
    """Prints logic expressions as C; ``symbol`` maps each free symbol to an lvalue."""

    def __init__(self, symbol: Callable[[Var], str]):
        self.symbol = symbol
        self.uses_floordiv = False

    def __call__(self, e: Expr) -> str:
        match e:
            case Var():
                return self.symbol(e)
            case IntConst(value):
                return _int_literal(value)
            case RealConst(value):
                return _real_literal(value)
            case BoolConst(value):
                return "1" if value else "0"
            case Neg(arg):
                return f"(-{self(arg)})"
            case Add(args):
                return "(" + " + ".join(self(a) for a in args) + ")"
            case Sub(lhs, rhs):
                return f"({self(lhs)} - {self(rhs)})"
            case Scale(coef, arg):
                factor = _int_literal(int(coef)) if e.sort is Sort.INT else _real_literal(coef)
                return f"({factor} * {self(arg)})"
            case IntDiv(arg, divisor):
                self.uses_floordiv = True
                return f"synt_floordiv({self(arg)}, {_int_literal(divisor)})"
            case Ite(c, t, f) | FIte(c, t, f):
                return f"({self(c)} ? {self(t)} : {self(f)})"
            case Cmp(op, lhs, rhs):
                c_op = {"=": "==", "!=": "!="}.get(op, op)
                return f"({self(lhs)} {c_op} {self(rhs)})"
            case Not(arg):
                return f"(!{self(arg)})"
            case And(args):
                return "(" + " && ".join(self(a) for a in args) + ")" if args else "1"
            case Or(args):
                return "(" + " || ".join(self(a) for a in args) + ")" if args else "0"
            case Implies(lhs, rhs):
                return f"(!{self(lhs)} || {self(rhs)})"
            case Iff(lhs, rhs):
                return f"(({self(lhs)} ? 1 : 0) == ({self(rhs)} ? 1 : 0))"
        raise InternalError(f"cannot print {e!r} as C")


def _value_literal(value: Value, sort: Sort) -> str:
    if sort is Sort.BOOL:
        return "1" if value else "0"
    if sort is Sort.INT:
        return _int_literal(int(value))
    return _real_literal(Fraction(value))


# --------------------------------------------------------------------------- program


class _Emitter:
    def __init__(self, p: SynthesisProblem, k: int):
        self.p = p
        self.k = k
        self.node = c_identifier(p.name)
        self.arrays = array_names(p, self.node)
        self.lines: List[str] = []
        self.uses_floordiv = False

    def arr(self, base: str, index) -> str:
        return f"{self.arrays[base]}[{index}]"

    def input_param(self, base: str) -> str:
        return f"in_{base}"

    def window_symbol(self, var: Var) -> str:
        """Symbols of a check whose path positions coincide with array slots."""
        ref = parse_symbol(var.name)
        if ref.kind == "input":
            return self.input_param(ref.base)
        if ref.kind in ("input_copy", "position"):
            return self.arr(ref.base, ref.index)
        raise InternalError(f"unexpected symbol {var.name} in a skolem")

    def printer(self, symbol: Callable[[Var], str]) -> CExpression:
        return CExpression(symbol)

    def render(self, printer: CExpression, e: Expr) -> str:
        text = printer(e)
        self.uses_floordiv = self.uses_floordiv or printer.uses_floordiv
        return text

    def emit_cascade(self, skolem: GuardedSkolem, targets: Mapping[str, str], indent: str) -> None:
        printer = self.printer(self.window_symbol)
        if not skolem.cases:
            self.lines.append(f'{indent}{self.node}_fail("{skolem.tag}");')
            return
        for index, case in enumerate(skolem.cases):
            keyword = "if" if index == 0 else "} else if"
            self.lines.append(f"{indent}{keyword} ({self.render(printer, case.guard)}) {{")
            for name, term in case.assigns.items():
                self.lines.append(f"{indent}    {targets[name]} = {self.render(printer, term)};")
        self.lines.append(f"{indent}}} else {{")
        self.lines.append(f'{indent}    {self.node}_fail("{skolem.tag}");')
        self.lines.append(f"{indent}}}")

    def emit_derived(self, slot_next: Callable[[str], str], slot_prev: str, indent: str) -> None:
        def symbol(var: Var) -> str:
            ref = parse_symbol(var.name)
            if ref.kind == "input":
                return self.input_param(ref.base)
            if ref.kind == "next":
                return slot_next(ref.base)
            if ref.kind == "current":
                return self.arr(ref.base, slot_prev)
            raise InternalError(f"unexpected symbol {var.name} in a derived definition")

        printer = self.printer(symbol)
        for var in self.p.derived:
            target = slot_next(var.name)
            self.lines.append(f"{indent}{target} = {self.render(printer, self.p.derived_trans[var.name])};")

    def emit(self, init_model: Mapping[str, Value], skolems: List[GuardedSkolem]) -> str:
        p, k, node = self.p, self.k, self.node
        out = self.lines
        params = ", ".join(
            f"{C_TYPES[v.sort]} {self.input_param(p.shadow_of(v).name)}" for v in p.inputs
        ) or "void"

        out.append("void %s_init(void) {" % node)
        for var in p.state:
            out.append(f"    {self.arr(var.name, 0)} = {_value_literal(init_model[var.name], var.sort)};")
        init_printer = self.printer(lambda v: self.arr(v.name, 0))
        for var in p.derived:
            value = self.render(init_printer, p.derived_init[var.name])
            out.append(f"    {self.arr(var.name, 0)} = {value};")
        if k > 0:
            out.append(f"    {node}_steps = 0;")
        out.append("}")
        out.append("")

        out.append(f"void {node}_step({params}) {{")
        for j in range(k):
            out.append(f"    if ({node}_steps == {j}) {{")
            targets = {v.name + "@next": self.arr(v.name, j + 1) for v in p.state}
            self.emit_cascade(skolems[j], targets, "        ")
            self.emit_derived(lambda base, j=j: self.arr(base, j + 1), str(j), "        ")
            out.append(f"        {node}_steps = {j + 1};")
            out.append("        return;")
            out.append("    }")
        for var in p.state:
            out.append(f"    {C_TYPES[var.sort]} next_{var.name} = 0;")
        for var in p.derived:
            out.append(f"    {C_TYPES[var.sort]} next_{var.name} = 0;")
        targets = {v.name + "@next": f"next_{v.name}" for v in p.state}
        self.emit_cascade(skolems[k], targets, "    ")
        self.emit_derived(lambda base: f"next_{base}", str(k), "    ")
        if k > 0:
            out.append(f"    for (int j = 0; j < {k}; j++) {{")
            for var in p.observables:
                out.append(f"        {self.arr(var.name, 'j')} = {self.arr(var.name, 'j + 1')};")
            out.append("    }")
        for var in p.observables:
            out.append(f"    {self.arr(var.name, k)} = next_{var.name};")
        out.append("}")
        out.append("")

        latest = f"({node}_steps < {k} ? {node}_steps : {k})" if k > 0 else "0"
        out.append(f"void {node}_print(FILE *out) {{")
        out.append(f"    int at = {latest};")
        for index, var in enumerate(p.observables):
            sep = "" if index == 0 else " "
            slot = self.arr(var.name, "at")
            if var.sort is Sort.INT:
                out.append(f'    fprintf(out, "{sep}%" PRId64, {slot});')
            elif var.sort is Sort.REAL:
                out.append(f'    fprintf(out, "{sep}%.17g", {slot});')
            else:
                out.append(f'    fprintf(out, "{sep}%d", {slot} ? 1 : 0);')
        out.append('    fprintf(out, "\\n");')
        out.append("}")
        return "\n".join(out)


def _header(p: SynthesisProblem, k: int, emitter: _Emitter) -> List[str]:
    node = emitter.node
    lines = [
        f"/* {node}.c: generated by contractsynth {__version__} from contract {p.name},"
        f" history depth k = {k}. */",
        "#include <inttypes.h>",
        "#include <stdint.h>",
        "#include <stdio.h>",
        "#include <stdlib.h>",
        "",
        f"#define {node.upper()}_K {k}",
        "",
    ]
    for var in p.observables:
        lines.append(f"{C_TYPES[var.sort]} {emitter.arrays[var.name]}[{k + 1}];")
    if k > 0:
        lines.append(f"static int {node}_steps = 0;")
    lines.append("")
    if emitter.uses_floordiv:
        lines.extend(
            [
                "static int64_t synt_floordiv(int64_t a, int64_t b) {",
                "    int64_t q = a / b;",
                "    if (a % b != 0 && ((a < 0) != (b < 0))) {",
                "        q--;",
                "    }",
                "    return q;",
                "}",
                "",
            ]
        )
    lines.extend(
        [
            f"static void {node}_fail(const char *where) {{",
            f'    fprintf(stderr, "{node}: no skolem case applies in %s\\n", where);',
            "    abort();",
            "}",
            "",
        ]
    )
    return lines


def emit(p: SynthesisProblem, result) -> EmittedProgram:
    """C implementation of a realizable result.

    ``result`` carries ``init_model`` and ``skolems`` (base_0..base_{k-1} then extend_k);
    both a synthesis result and a loaded Skolem bundle qualify.
    """
    init_model, skolems = result.init_model, list(result.skolems)
    if not skolems:
        raise InternalError("nothing to emit: empty skolem list")
    k = len(skolems) - 1
    emitter = _Emitter(p, k)
    body = emitter.emit(init_model, list(skolems))
    source = "\n".join(_header(p, k, emitter)) + body + "\n"
    source += emit_driver(p, emitter.node)
    program = EmittedProgram(
        source=source,
        node=emitter.node,
        k=k,
        inputs=[(p.shadow_of(v).name, v.sort) for v in p.inputs],
        observables=[(v.name, v.sort) for v in p.observables],
    )
    logger.info("emitted %s: k=%d, %d cases", p.name, k, sum(len(s.cases) for s in skolems))
    return program


_SCAN = {Sort.INT: '"%" SCNd64', Sort.REAL: '"%lf"', Sort.BOOL: '"%d"'}


def emit_driver(p: SynthesisProblem, node: str = "") -> str:
    """``main`` reading one line of inputs per step and printing the observable state after each."""
    node = node or c_identifier(p.name)
    lines = ["", "#ifdef DRIVER", "int main(void) {", f"    {node}_init();", f"    {node}_print(stdout);"]
    lines.append("    for (;;) {")
    names = [p.shadow_of(v) for v in p.inputs]
    for var in names:
        lines.append(f"        {C_TYPES[var.sort]} in_{var.name} = 0;")
    if not names:
        lines.append('        if (scanf("%*s") == EOF) {')
        lines.append("            return 0;")
        lines.append("        }")
    for index, var in enumerate(names):
        lines.append(f"        int rc_{var.name} = scanf({_SCAN[var.sort]}, &in_{var.name});")
        if index == 0:
            lines.append(f"        if (rc_{var.name} == EOF) {{")
            lines.append("            return 0;")
            lines.append("        }")
        lines.append(f"        if (rc_{var.name} != 1) {{")
        lines.append(f'            fprintf(stderr, "{node}: malformed input for {var.name}\\n");')
        lines.append("            return 2;")
        lines.append("        }")
    args = ", ".join(f"in_{v.name}" for v in names)
    lines.append(f"        {node}_step({args});")
    lines.append(f"        {node}_print(stdout);")
    lines.append("    }")
    lines.append("}")
    lines.append("#endif")
    return "\n".join(lines) + "\n"
