"""
Concrete syntax for spec files and synthesized programs, plus the AST-size metric.
"""
from __future__ import annotations

from ..core import (
    BinOp,
    Expr,
    FunctionSpec,
    Neg,
    PredicateDef,
    Procedure,
    SetLit,
    format_expr,
)
from ..core.program import (
    Call,
    Error,
    Free,
    If,
    Load,
    Malloc,
    Seq,
    Skip,
    Statement,
    Store,
)
from .parser import SpecFile

INDENT = "  "


def print_spec(spec: SpecFile) -> str:
    """Text accepted back by ``parse_spec`` with an equal result."""
    parts = [f"#! {name} = {value}" for name, value in spec.budgets]
    parts += [print_predicate(p) for p in spec.predicates]
    parts += [print_function(f) for f in spec.functions]
    return "\n\n".join(parts) + "\n"


def print_predicate(definition: PredicateDef) -> str:
    params = ", ".join(f"{p.sort.value} {p.name}" for p in definition.params)
    header = f"predicate {definition.name}({params})"
    if definition.perm_params:
        header += "<" + ", ".join(p.name for p in definition.perm_params) + ">"
    clauses = [f"{format_expr(c.selector)} => {c.body}" for c in definition.clauses]
    body = f"\n{INDENT}| ".join(clauses)
    return f"{header} {{\n{INDENT}  {body}\n}}"


def print_function(spec: FunctionSpec) -> str:
    formals = ", ".join(f"{f.sort.value} {f.name}" for f in spec.formals)
    return f"void {spec.name}({formals})\n{INDENT}{spec.pre}\n{INDENT}{spec.post}"


def print_program(proc: Procedure) -> str:
    formals = ", ".join(f"{f.sort.value} {f.name}" for f in proc.formals)
    lines = [f"void {proc.name}({formals}) {{"]
    lines += _statement_lines(proc.body, 1)
    lines.append("}")
    return "\n".join(lines)


def print_statement(stmt: Statement) -> str:
    """Single-statement rendering; ``Skip`` prints as the empty string."""
    return "\n".join(_statement_lines(stmt, 0))


def _address(base: Expr, offset: int) -> str:
    if offset == 0:
        return f"*{format_expr(base)}"
    return f"*({format_expr(base)} + {offset})"


def _statement_lines(stmt: Statement, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(stmt, Skip):
        return []
    if isinstance(stmt, Seq):
        return [line for child in stmt.stmts for line in _statement_lines(child, depth)]
    if isinstance(stmt, Load):
        return [f"{pad}let {stmt.var} = {_address(stmt.base, stmt.offset)};"]
    if isinstance(stmt, Store):
        return [f"{pad}{_address(stmt.base, stmt.offset)} = {format_expr(stmt.value)};"]
    if isinstance(stmt, Malloc):
        return [f"{pad}let {stmt.var} = malloc({stmt.size});"]
    if isinstance(stmt, Free):
        return [f"{pad}free({format_expr(stmt.target)});"]
    if isinstance(stmt, Call):
        args = ", ".join(format_expr(a) for a in stmt.args)
        return [f"{pad}{stmt.name}({args});"]
    if isinstance(stmt, Error):
        return [f"{pad}error;"]
    if isinstance(stmt, If):
        lines = [f"{pad}if ({format_expr(stmt.cond)}) {{"]
        lines += _statement_lines(stmt.then, depth + 1)
        lines.append(f"{pad}}} else {{")
        lines += _statement_lines(stmt.orelse, depth + 1)
        lines.append(f"{pad}}}")
        return lines
    raise TypeError(f"Unknown statement: {stmt!r}")


# --- AST size ---------------------------------------------------------------


def expr_size(expr: Expr) -> int:
    if isinstance(expr, BinOp):
        return 1 + expr_size(expr.lhs) + expr_size(expr.rhs)
    if isinstance(expr, Neg):
        return 1 + expr_size(expr.arg)
    if isinstance(expr, SetLit):
        return 1 + sum(expr_size(e) for e in expr.elems)
    return 1


def _address_size(base: Expr, offset: int) -> int:
    # a non-zero offset is the node (base + offset)
    return expr_size(base) + (2 if offset else 0)


def statement_size(stmt: Statement) -> int:
    if isinstance(stmt, Skip):
        return 0
    if isinstance(stmt, Seq):
        return sum(statement_size(s) for s in stmt.stmts)
    if isinstance(stmt, Load):
        return 2 + _address_size(stmt.base, stmt.offset)
    if isinstance(stmt, Store):
        return 1 + _address_size(stmt.base, stmt.offset) + expr_size(stmt.value)
    if isinstance(stmt, Malloc):
        return 3
    if isinstance(stmt, Free):
        return 1 + expr_size(stmt.target)
    if isinstance(stmt, Call):
        return 1 + sum(expr_size(a) for a in stmt.args)
    if isinstance(stmt, If):
        return (
            1 + expr_size(stmt.cond) + statement_size(stmt.then) + statement_size(stmt.orelse)
        )
    if isinstance(stmt, Error):
        return 1
    raise TypeError(f"Unknown statement: {stmt!r}")


def ast_size(proc: Procedure) -> int:
    """Statement and expression nodes of the body plus one per formal."""
    return len(proc.formals) + statement_size(proc.body)
