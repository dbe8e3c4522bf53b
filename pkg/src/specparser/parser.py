"""
Recursive-descent parser for ``.bossl`` spec files and emitted programs.

Spec files hold predicate definitions followed by function specifications.
The last function is the synthesis goal; earlier ones form the library that
the goal may call. A line ``#! max_close_depth = 2`` raises a search budget
for this file only.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from ..config import BUDGETS
from ..core import (
    MUT,
    TRUE,
    Assertion,
    BinOp,
    Block,
    BoolConst,
    Context,
    Expr,
    FunctionSpec,
    IntConst,
    Neg,
    Op,
    PermConst,
    PointsTo,
    PredApp,
    PredClause,
    PredicateDef,
    Procedure,
    SetLit,
    Sort,
    SynthGoal,
    Var,
    WellFormednessError,
    check_pred_well_formed,
    check_spec_well_formed,
    conj,
    goal_of,
)
from ..core.heap import Heaplet
from ..core.program import SKIP, Call, Error, Free, If, Load, Malloc, Statement, Store, seq
from .lexer import SpecParseError, Token, TokenStream, tokenize

logger = logging.getLogger(__name__)

_DATA_SORTS = {"loc": Sort.LOC, "int": Sort.INT, "bool": Sort.BOOL, "set": Sort.SET}
_PROGRAM_SORTS = {"loc": Sort.LOC, "int": Sort.INT}
_DIRECTIVE = re.compile(r"#!\s*(\w+)\s*=\s*(-?\d+)\s*$")


@dataclass(frozen=True)
class SpecFile:
    predicates: tuple[PredicateDef, ...]
    library: tuple[FunctionSpec, ...]
    goal_spec: FunctionSpec
    # search budget overrides, sorted by name
    budgets: tuple[tuple[str, int], ...] = ()

    @property
    def functions(self) -> tuple[FunctionSpec, ...]:
        return self.library + (self.goal_spec,)

    def context(self) -> Context:
        """Sigma with every declared function, the goal included for recursion."""
        return Context(
            {p.name: p for p in self.predicates},
            {f.name: f for f in self.functions},
        )

    @property
    def goal(self) -> SynthGoal:
        return goal_of(self.goal_spec, self.context())


def parse_spec(text: str) -> SpecFile:
    """
    Parse, sort-check and well-formedness-check a spec file.

    Raises:
        SpecParseError: syntax error, unknown identifier, sort mismatch or
            a file without any function specification ("no goal")
        WellFormednessError: a predicate or function spec is ill-formed
    """
    budgets = _directives(text)
    parser = _SpecParser(TokenStream(tokenize(text)))
    raw_predicates, raw_functions = parser.parse_file()
    if not raw_functions:
        raise SpecParseError("no goal: the file declares no function specification", 1, 1)

    signatures = {
        pred.name: tuple(p.sort for p in pred.params) for pred, _ in raw_predicates
    }
    perm_arities = {pred.name: len(pred.perm_params) for pred, _ in raw_predicates}
    predicates = tuple(
        _resolve_predicate(pred, token, signatures, perm_arities) for pred, token in raw_predicates
    )
    functions = tuple(
        _resolve_function(spec, token, signatures, perm_arities) for spec, token in raw_functions
    )

    names = [f.name for f in functions]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise SpecParseError(f"duplicate function specification: {', '.join(duplicates)}")

    violations = [v for pred in predicates for v in check_pred_well_formed(pred)]
    violations += [v for spec in functions for v in check_spec_well_formed(spec)]
    if violations:
        raise WellFormednessError(violations)

    logger.debug(
        "Parsed %d predicates, %d library functions, goal %s",
        len(predicates),
        len(functions) - 1,
        functions[-1].name,
    )
    return SpecFile(predicates, functions[:-1], functions[-1], budgets)


def _directives(text: str) -> tuple[tuple[str, int], ...]:
    budgets: dict[str, int] = {}
    for number, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped.startswith("#!"):
            continue
        match = _DIRECTIVE.match(stripped)
        if match is None:
            raise SpecParseError(f"malformed directive {stripped!r}", number, 1)
        name, value = match.group(1), int(match.group(2))
        if name not in BUDGETS:
            raise SpecParseError(
                f"unknown directive {name!r}; expected one of {', '.join(BUDGETS)}", number, 1
            )
        if value < 1:
            raise SpecParseError(f"{name} must be positive, got {value}", number, 1)
        budgets[name] = value
    return tuple(sorted(budgets.items()))


def parse_program(text: str) -> list[Procedure]:
    """Loader for the concrete syntax produced by ``print_program``."""
    stream = TokenStream(tokenize(text))
    procedures: list[Procedure] = []
    parser = _SpecParser(stream)
    while not stream.at_eof():
        procedures.append(parser.parse_procedure())
    return procedures


class _SpecParser:
    def __init__(self, stream: TokenStream) -> None:
        self.s = stream

    # --- declarations -----------------------------------------------------

    def parse_file(
        self,
    ) -> tuple[list[tuple[PredicateDef, Token]], list[tuple[FunctionSpec, Token]]]:
        predicates: list[tuple[PredicateDef, Token]] = []
        functions: list[tuple[FunctionSpec, Token]] = []
        seen: set[str] = set()
        while not self.s.at_eof():
            start = self.s.peek()
            if self.s.at("predicate"):
                pred = self.parse_predicate()
                if pred.name in seen:
                    raise self.s.error(f"duplicate predicate '{pred.name}'", start)
                seen.add(pred.name)
                predicates.append((pred, start))
            elif self.s.at("void"):
                functions.append((self.parse_function(), start))
            else:
                raise self.s.error(f"expected 'predicate' or 'void', found {start}")
        return predicates, functions

    def parse_predicate(self) -> PredicateDef:
        self.s.expect("predicate")
        name = self.s.expect_ident("predicate name").text
        params = self.parse_params(_DATA_SORTS)
        perm_params: list[Var] = []
        if self.s.accept("<"):
            perm_params.append(Var(self.s.expect_ident("permission parameter").text, Sort.PERM))
            while self.s.accept(","):
                perm_params.append(Var(self.s.expect_ident("permission parameter").text, Sort.PERM))
            self.s.expect(">")
        self.s.expect("{")
        clauses = [self.parse_clause()]
        while self.s.accept("|"):
            clauses.append(self.parse_clause())
        self.s.expect("}")
        return PredicateDef(name, tuple(params), tuple(perm_params), tuple(clauses))

    def parse_clause(self) -> PredClause:
        selector = self.parse_formula()
        self.s.expect("=>")
        return PredClause(selector, self.parse_assertion())

    def parse_function(self) -> FunctionSpec:
        self.s.expect("void")
        name = self.s.expect_ident("function name").text
        formals = self.parse_params(_PROGRAM_SORTS)
        pre = self.parse_assertion()
        post = self.parse_assertion()
        return FunctionSpec(name, tuple(formals), pre, post)

    def parse_params(self, allowed: dict[str, Sort]) -> list[Var]:
        self.s.expect("(")
        params: list[Var] = []
        if not self.s.at(")"):
            params.append(self.parse_param(allowed))
            while self.s.accept(","):
                params.append(self.parse_param(allowed))
        self.s.expect(")")
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise self.s.error("duplicate parameter name")
        return params

    def parse_param(self, allowed: dict[str, Sort]) -> Var:
        sort_token = self.s.expect_ident("sort")
        if sort_token.text not in allowed:
            raise self.s.error(
                f"unknown sort '{sort_token.text}' (expected one of {', '.join(allowed)})",
                sort_token,
            )
        return Var(self.s.expect_ident("parameter name").text, allowed[sort_token.text])

    # --- assertions -------------------------------------------------------

    def parse_assertion(self) -> Assertion:
        self.s.expect("{")
        pure: Expr = TRUE
        if self.s.find_before_close(";"):
            pure = self.parse_formula()
            self.s.expect(";")
        heaplets: list[Heaplet] = []
        if not self.s.accept("emp"):
            heaplets.append(self.parse_heaplet())
            while self.s.accept("**"):
                heaplets.append(self.parse_heaplet())
        self.s.expect("}")
        return Assertion(conj([pure]), tuple(heaplets))

    def parse_heaplet(self) -> Heaplet:
        if self.s.accept("["):
            base = self.parse_additive()
            self.s.expect(",")
            size = self.s.expect_int()
            if size <= 0:
                raise self.s.error("block size must be positive")
            self.s.expect("]")
            return Block(base, size, self.parse_annotation())
        if self.s.peek().kind == "ident" and self.s.at("(", 1):
            name = self.s.next().text
            args = self.parse_args()
            perms: tuple[Expr, ...] = ()
            if self.s.accept("<"):
                items = [self.parse_perm()]
                while self.s.accept(","):
                    items.append(self.parse_perm())
                self.s.expect(">")
                perms = tuple(items)
            return PredApp(name, args, perms)
        base, offset = self.parse_location()
        self.s.expect(":->")
        value = self.parse_additive()
        return PointsTo(base, offset, value, self.parse_annotation())

    def parse_location(self) -> tuple[Expr, int]:
        if self.s.accept("("):
            base = Var(self.s.expect_ident("location").text)
            offset = 0
            if self.s.accept("+"):
                offset = self.s.expect_int()
            self.s.expect(")")
            return base, offset
        return Var(self.s.expect_ident("location").text), 0

    def parse_annotation(self) -> Expr:
        if not self.s.accept("<"):
            return MUT
        perm = self.parse_perm()
        self.s.expect(">")
        return perm

    def parse_perm(self) -> Expr:
        token = self.s.expect_ident("permission")
        if token.text == "Imm":
            raise self.s.error("'Imm' may not appear in specifications", token)
        if token.text == "Mut":
            return MUT
        return Var(token.text, Sort.PERM)

    def parse_args(self) -> tuple[Expr, ...]:
        self.s.expect("(")
        args: list[Expr] = []
        if not self.s.at(")"):
            args.append(self.parse_additive())
            while self.s.accept(","):
                args.append(self.parse_additive())
        self.s.expect(")")
        return tuple(args)

    # --- pure formulas ----------------------------------------------------

    def parse_formula(self) -> Expr:
        left = self.parse_and()
        while self.s.accept("\\/") or self.s.accept("||"):
            left = BinOp(Op.OR, left, self.parse_and())
        return left

    def parse_and(self) -> Expr:
        left = self.parse_not()
        while self.s.accept("/\\") or self.s.accept("&&"):
            left = BinOp(Op.AND, left, self.parse_not())
        return left

    def parse_not(self) -> Expr:
        if self.s.accept("not"):
            return Neg(self.parse_not())
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_additive()
        for text in ("==", "!=", "<=", ">=", "<", ">"):
            if self.s.accept(text):
                right = self.parse_additive()
                break
        else:
            return left
        if text == "==":
            return BinOp(Op.EQ, left, right)
        if text == "!=":
            return Neg(BinOp(Op.EQ, left, right))
        if text == "<=":
            return BinOp(Op.LE, left, right)
        if text == ">=":
            return BinOp(Op.LE, right, left)
        if text == "<":
            return BinOp(Op.LT, left, right)
        return BinOp(Op.LT, right, left)

    def parse_additive(self) -> Expr:
        left = self.parse_atom()
        while True:
            if self.s.accept("+"):
                left = BinOp(Op.PLUS, left, self.parse_atom())
            elif self.s.accept("-"):
                left = BinOp(Op.MINUS, left, self.parse_atom())
            elif self.s.accept("++"):
                left = BinOp(Op.UNION, left, self.parse_atom())
            else:
                return left

    def parse_atom(self) -> Expr:
        token = self.s.peek()
        if token.kind == "int":
            return IntConst(self.s.expect_int())
        if self.s.accept("-"):
            return IntConst(-self.s.expect_int())
        if self.s.accept("("):
            inner = self.parse_formula()
            self.s.expect(")")
            return inner
        if self.s.accept("{"):
            elems: list[Expr] = []
            if not self.s.at("}"):
                elems.append(self.parse_additive())
                while self.s.accept(","):
                    elems.append(self.parse_additive())
            self.s.expect("}")
            return SetLit(tuple(elems))
        if token.kind == "ident":
            self.s.next()
            if token.text == "true":
                return TRUE
            if token.text == "false":
                return BoolConst(False)
            if token.text == "Mut":
                return MUT
            if token.text == "Imm":
                raise self.s.error("'Imm' may not appear in specifications", token)
            return Var(token.text)
        raise self.s.error(f"expected expression, found {token}")

    # --- programs ---------------------------------------------------------

    def parse_procedure(self) -> Procedure:
        self.s.expect("void")
        name = self.s.expect_ident("procedure name").text
        formals = self.parse_params(_PROGRAM_SORTS)
        return Procedure(name, tuple(formals), self.parse_block())

    def parse_block(self) -> Statement:
        self.s.expect("{")
        stmts: list[Statement] = []
        while not self.s.accept("}"):
            if self.s.at_eof():
                raise self.s.error("unterminated block")
            stmts.append(self.parse_statement())
        return seq(*stmts) if stmts else SKIP

    def parse_statement(self) -> Statement:
        token = self.s.peek()
        if self.s.accept("let"):
            var = self.s.expect_ident("variable").text
            self.s.expect("=")
            stmt: Statement
            if self.s.accept("*"):
                base, offset = self.parse_location()
                stmt = Load(var, base, offset)
            elif self.s.accept("malloc"):
                self.s.expect("(")
                stmt = Malloc(var, self.s.expect_int())
                self.s.expect(")")
            else:
                raise self.s.error("expected '*' or 'malloc' after 'let ... ='")
            self.s.expect(";")
            return stmt
        if self.s.accept("*"):
            base, offset = self.parse_location()
            self.s.expect("=")
            value = self.parse_additive()
            self.s.expect(";")
            return Store(base, offset, value)
        if self.s.accept("free"):
            self.s.expect("(")
            target = self.parse_additive()
            self.s.expect(")")
            self.s.expect(";")
            return Free(target)
        if self.s.accept("if"):
            self.s.expect("(")
            cond = self.parse_formula()
            self.s.expect(")")
            then = self.parse_block()
            self.s.expect("else")
            return If(cond, then, self.parse_block())
        if self.s.accept("error"):
            self.s.expect(";")
            return Error()
        if token.kind == "ident" and self.s.at("(", 1):
            name = self.s.next().text
            args = self.parse_args()
            self.s.expect(";")
            return Call(name, args)
        raise self.s.error(f"expected statement, found {token}")


# --- sort resolution ------------------------------------------------------


class _SortInference:
    """Propagates sorts from declarations and positions to every variable."""

    def __init__(
        self,
        declared: dict[str, Sort],
        signatures: dict[str, tuple[Sort, ...]],
        perm_arities: dict[str, int],
        where: Token,
    ) -> None:
        self.sorts: dict[str, Sort] = dict(declared)
        self.declared = set(declared)
        self.signatures = signatures
        self.perm_arities = perm_arities
        self.where = where
        self.changed = False
        self.final = False

    def error(self, message: str) -> SpecParseError:
        return SpecParseError(message, self.where.line, self.where.col)

    def run(self, formulas: list[Expr], heaplets: list[Heaplet]) -> dict[str, Sort]:
        for _ in range(16):
            self.changed = False
            self._pass(formulas, heaplets)
            if not self.changed:
                break
        self.final = True
        self._pass(formulas, heaplets)
        return self.sorts

    def _pass(self, formulas: list[Expr], heaplets: list[Heaplet]) -> None:
        for formula in formulas:
            self.expr(formula, Sort.BOOL)
        for heaplet in heaplets:
            self.heaplet(heaplet)

    def heaplet(self, heaplet: Heaplet) -> None:
        if isinstance(heaplet, PointsTo):
            self.expr(heaplet.base, Sort.LOC)
            self.expr(heaplet.value, None)
            self.expr(heaplet.perm, Sort.PERM)
        elif isinstance(heaplet, Block):
            self.expr(heaplet.base, Sort.LOC)
            self.expr(heaplet.perm, Sort.PERM)
        else:
            if heaplet.name not in self.signatures:
                raise self.error(f"unknown predicate '{heaplet.name}'")
            signature = self.signatures[heaplet.name]
            if len(signature) != len(heaplet.args) or self.perm_arities[heaplet.name] != len(
                heaplet.perms
            ):
                raise self.error(
                    f"'{heaplet.name}' expects {len(signature)} arguments and "
                    f"{self.perm_arities[heaplet.name]} permissions"
                )
            for arg, sort in zip(heaplet.args, signature):
                self.expr(arg, sort)
            for perm in heaplet.perms:
                self.expr(perm, Sort.PERM)

    def var(self, name: str, expected: Sort | None) -> Sort | None:
        current = self.sorts.get(name)
        if expected is None:
            return current
        if current is None:
            self.sorts[name] = expected
            self.changed = True
            return expected
        if current == expected:
            return current
        if current.numeric and expected.numeric:
            if current == Sort.INT and name not in self.declared:
                self.sorts[name] = Sort.LOC
                self.changed = True
            return self.sorts[name]
        raise self.error(
            f"sort mismatch for '{name}': used as {expected.value}, known as {current.value}"
        )

    def expr(self, expr: Expr, expected: Sort | None) -> Sort | None:
        actual = self._infer(expr, expected)
        if expected is not None and actual is not None:
            if not (actual == expected or (actual.numeric and expected.numeric)):
                raise self.error(
                    f"sort mismatch in '{expr}': expected {expected.value}, found {actual.value}"
                )
        return actual

    def _infer(self, expr: Expr, expected: Sort | None) -> Sort | None:
        if isinstance(expr, IntConst):
            return Sort.INT
        if isinstance(expr, BoolConst):
            return Sort.BOOL
        if isinstance(expr, PermConst):
            return Sort.PERM
        if isinstance(expr, Var):
            if expr.sort == Sort.PERM:
                return self.var(expr.name, Sort.PERM)
            return self.var(expr.name, expected)
        if isinstance(expr, SetLit):
            for elem in expr.elems:
                self.expr(elem, Sort.INT)
            return Sort.SET
        if isinstance(expr, Neg):
            self.expr(expr.arg, Sort.BOOL)
            if self.final and isinstance(expr.arg, BinOp) and expr.arg.op == Op.EQ:
                if self.expr(expr.arg.lhs, None) == Sort.PERM:
                    raise self.error(f"permission inequalities are not supported: '{expr}'")
            return Sort.BOOL
        if isinstance(expr, BinOp):
            if expr.op in (Op.AND, Op.OR):
                self.expr(expr.lhs, Sort.BOOL)
                self.expr(expr.rhs, Sort.BOOL)
                return Sort.BOOL
            if expr.op in (Op.PLUS, Op.MINUS):
                self.expr(expr.lhs, Sort.INT)
                self.expr(expr.rhs, Sort.INT)
                return Sort.INT
            if expr.op in (Op.LE, Op.LT):
                self.expr(expr.lhs, Sort.INT)
                self.expr(expr.rhs, Sort.INT)
                return Sort.BOOL
            if expr.op == Op.UNION:
                self.expr(expr.lhs, Sort.SET)
                self.expr(expr.rhs, Sort.SET)
                return Sort.SET
            left = self.expr(expr.lhs, None)
            right = self.expr(expr.rhs, left)
            if left is None and right is not None:
                self.expr(expr.lhs, right)
            return Sort.BOOL
        raise self.error(f"unsupported term '{expr}'")


def _typed(sorts: dict[str, Sort], names: set[str]) -> dict[Var, Expr]:
    return {Var(n): Var(n, sorts.get(n, Sort.INT)) for n in names}


def _resolve_predicate(
    pred: PredicateDef,
    where: Token,
    signatures: dict[str, tuple[Sort, ...]],
    perm_arities: dict[str, int],
) -> PredicateDef:
    declared = {p.name: p.sort for p in pred.params}
    declared.update({p.name: Sort.PERM for p in pred.perm_params})
    clauses: list[PredClause] = []
    for clause in pred.clauses:
        inference = _SortInference(declared, signatures, perm_arities, where)
        sorts = inference.run([clause.selector, clause.body.pure], list(clause.body.spatial))
        mapping = _typed(sorts, {v.name for v in clause.free_vars()})
        clauses.append(PredClause(clause.selector.subst(mapping), clause.body.subst(mapping)))
    return PredicateDef(pred.name, pred.params, pred.perm_params, tuple(clauses))


def _resolve_function(
    spec: FunctionSpec,
    where: Token,
    signatures: dict[str, tuple[Sort, ...]],
    perm_arities: dict[str, int],
) -> FunctionSpec:
    declared = {f.name: f.sort for f in spec.formals}
    inference = _SortInference(declared, signatures, perm_arities, where)
    sorts = inference.run(
        [spec.pre.pure, spec.post.pure], list(spec.pre.spatial) + list(spec.post.spatial)
    )
    names = {v.name for v in spec.pre.free_vars() | spec.post.free_vars()}
    mapping = _typed(sorts, names | {f.name for f in spec.formals})
    return FunctionSpec(
        spec.name,
        spec.formals,
        spec.pre.subst(mapping),
        spec.post.subst(mapping),
    )
