"""
SMT-LIB2 translation and the external-prover subprocess.

Integers and locations are ``Int``, booleans ``Bool``, permissions ``Int``
restricted to 0 (Mut) and 1 (Imm). Sets are emulated by membership
booleans over the element terms of the query plus one witness per set
equality atom, which is exact for unions of variables and literals.
"""
from __future__ import annotations

import logging
import subprocess
from enum import Enum

from ..core import (
    BinOp,
    BoolConst,
    Expr,
    IntConst,
    Neg,
    Op,
    PermConst,
    SetLit,
    Sort,
    Var,
    sort_of,
)
from .config import SmtConfig

logger = logging.getLogger(__name__)

_PERM_CODES = {"Mut": 0, "Imm": 1}


class SmtAnswer(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


def _name(var: Var) -> str:
    return f"v_{var.name}"


def _numeral(value: int) -> str:
    return str(value) if value >= 0 else f"(- {-value})"


class SmtTranslator:
    def __init__(self, formula: Expr) -> None:
        self.formula = formula
        self.vars = sorted(formula.free_vars(), key=lambda v: v.name)
        self.elements: list[Expr] = []
        self.witnesses: dict[Expr, str] = {}
        self._collect(formula)

    def _collect(self, expr: Expr) -> None:
        if isinstance(expr, SetLit):
            for elem in expr.elems:
                if elem not in self.elements:
                    self.elements.append(elem)
        if isinstance(expr, BinOp) and expr.op == Op.EQ and self._is_set_eq(expr):
            if expr not in self.witnesses:
                self.witnesses[expr] = f"w_{len(self.witnesses)}"
        for child in _children(expr):
            self._collect(child)

    @staticmethod
    def _is_set_eq(expr: BinOp) -> bool:
        return Sort.SET in (sort_of(expr.lhs), sort_of(expr.rhs))

    def _points(self) -> list[str]:
        return [self.term(e) for e in self.elements] + list(self.witnesses.values())

    def script(self) -> str:
        lines = ["(set-logic QF_LIA)"]
        for var in self.vars:
            if var.sort == Sort.BOOL:
                lines.append(f"(declare-fun {_name(var)} () Bool)")
            elif var.sort == Sort.SET:
                continue
            else:
                lines.append(f"(declare-fun {_name(var)} () Int)")
            if var.sort == Sort.PERM:
                lines.append(f"(assert (or (= {_name(var)} 0) (= {_name(var)} 1)))")
        for witness in self.witnesses.values():
            lines.append(f"(declare-fun {witness} () Int)")
        points = self._points()
        for var in self.vars:
            if var.sort != Sort.SET:
                continue
            for index in range(len(points)):
                lines.append(f"(declare-fun m_{var.name}_{index} () Bool)")
            # membership must agree on equal points
            for i in range(len(points)):
                for j in range(i + 1, len(points)):
                    lines.append(
                        f"(assert (=> (= {points[i]} {points[j]}) "
                        f"(= m_{var.name}_{i} m_{var.name}_{j})))"
                    )
        lines.append(f"(assert {self.formula_text(self.formula)})")
        lines.append("(check-sat)")
        lines.append("(exit)")
        return "\n".join(lines) + "\n"

    def term(self, expr: Expr) -> str:
        if isinstance(expr, IntConst):
            return _numeral(expr.value)
        if isinstance(expr, PermConst):
            return str(_PERM_CODES[expr.kind])
        if isinstance(expr, Var):
            return _name(expr)
        if isinstance(expr, BinOp) and expr.op in (Op.PLUS, Op.MINUS):
            return f"({expr.op.value} {self.term(expr.lhs)} {self.term(expr.rhs)})"
        raise ValueError(f"Cannot translate term to SMT-LIB: {expr}")

    def _member(self, term: Expr, point_index: int, point: str) -> str:
        if isinstance(term, Var):
            return f"m_{term.name}_{point_index}"
        if isinstance(term, SetLit):
            if not term.elems:
                return "false"
            options = " ".join(f"(= {point} {self.term(e)})" for e in term.elems)
            return f"(or {options})" if len(term.elems) > 1 else options
        if isinstance(term, BinOp) and term.op == Op.UNION:
            left = self._member(term.lhs, point_index, point)
            right = self._member(term.rhs, point_index, point)
            return f"(or {left} {right})"
        raise ValueError(f"Cannot translate set term to SMT-LIB: {term}")

    def formula_text(self, expr: Expr) -> str:
        if isinstance(expr, BoolConst):
            return "true" if expr.value else "false"
        if isinstance(expr, Var):
            return _name(expr)
        if isinstance(expr, Neg):
            return f"(not {self.formula_text(expr.arg)})"
        if not isinstance(expr, BinOp):
            raise ValueError(f"Cannot translate formula to SMT-LIB: {expr}")
        if expr.op == Op.AND:
            return f"(and {self.formula_text(expr.lhs)} {self.formula_text(expr.rhs)})"
        if expr.op == Op.OR:
            return f"(or {self.formula_text(expr.lhs)} {self.formula_text(expr.rhs)})"
        if expr.op in (Op.LE, Op.LT):
            return f"({expr.op.value} {self.term(expr.lhs)} {self.term(expr.rhs)})"
        if expr.op == Op.EQ:
            if self._is_set_eq(expr):
                points = self._points()
                parts = [
                    f"(= {self._member(expr.lhs, i, p)} {self._member(expr.rhs, i, p)})"
                    for i, p in enumerate(points)
                ]
                if not parts:
                    return "true"
                return parts[0] if len(parts) == 1 else f"(and {' '.join(parts)})"
            if sort_of(expr.lhs) == Sort.BOOL:
                return f"(= {self.formula_text(expr.lhs)} {self.formula_text(expr.rhs)})"
            return f"(= {self.term(expr.lhs)} {self.term(expr.rhs)})"
        raise ValueError(f"Cannot translate formula to SMT-LIB: {expr}")


def _children(expr: Expr) -> tuple[Expr, ...]:
    if isinstance(expr, BinOp):
        return (expr.lhs, expr.rhs)
    if isinstance(expr, Neg):
        return (expr.arg,)
    if isinstance(expr, SetLit):
        return expr.elems
    return ()


def to_smtlib(formula: Expr) -> str:
    """Satisfiability script for ``formula``."""
    return SmtTranslator(formula).script()


class SmtBackend:
    """One solver process per query, script on stdin, answer on stdout."""

    def __init__(self, config: SmtConfig) -> None:
        self.config = config

    def check_sat(self, formula: Expr) -> SmtAnswer:
        try:
            script = to_smtlib(formula)
        except ValueError as exc:
            logger.debug("Formula outside the SMT-LIB translation: %s", exc)
            return SmtAnswer.UNKNOWN
        try:
            result = subprocess.run(
                self.config.command(),
                input=script,
                capture_output=True,
                encoding="UTF-8",
                timeout=self.config.timeout_s,
            )
        except subprocess.TimeoutExpired:
            logger.debug("External prover timed out after %.1fs", self.config.timeout_s)
            return SmtAnswer.UNKNOWN
        except OSError as exc:
            logger.warning("External prover could not be started: %s", exc)
            return SmtAnswer.UNKNOWN
        lines = result.stdout.splitlines()
        first = lines[0].strip() if lines else ""
        if first in (SmtAnswer.SAT.value, SmtAnswer.UNSAT.value):
            return SmtAnswer(first)
        if result.returncode != 0:
            logger.warning(
                "External prover failed (%d): %s", result.returncode, result.stderr.strip()
            )
        return SmtAnswer.UNKNOWN
