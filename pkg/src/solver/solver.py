"""
Pure solver: validity of ``hypothesis => conclusion`` by refuting
``hypothesis /\\ not conclusion``.

The formula is simplified, put in negation normal form and split into
cubes. Each cube goes through congruence closure, set elimination and
linear arithmetic. Unsat is only ever derived by sound steps; sat is only
ever reported with a model that evaluates the original formula to true.
Everything else is Unknown, which callers treat as failure.
"""
from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from ..config import SolverConfig
from ..core import (
    FALSE,
    BinOp,
    Expr,
    IntConst,
    Neg,
    Op,
    SetLit,
    Sort,
    Value,
    Var,
    conj,
    evaluate,
    holds,
    sort_of,
)
from .arith import ArithBlowup, Infeasible, Linear, LinearSystem, linearize
from .congruence import CongruenceClosure, CongruenceConflict
from .normal import TooManyCubes, dnf, nnf, simplify
from .sets import SetConflict, SetConstraints
from .smtlib import SmtAnswer, SmtBackend

logger = logging.getLogger(__name__)

_PERM_VALUES = ("Mut", "Imm")
# candidate valuations tried per cube for residual permissions and sets
_MAX_ENUMERATION = 4096


class Verdict(str, Enum):
    VALID = "Valid"
    INVALID = "Invalid"
    UNKNOWN = "Unknown"


class SatStatus(str, Enum):
    SAT = "Sat"
    UNSAT = "Unsat"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SatResult:
    status: SatStatus
    # certified model for SAT; None when the external prover vouched for SAT
    model: dict[str, Value] | None = None


@dataclass(frozen=True)
class ValidityResult:
    verdict: Verdict
    countermodel: dict[str, Value] | None = None


@dataclass(frozen=True)
class EntailmentQuery:
    hypothesis: Expr
    conclusion: Expr

    def __post_init__(self) -> None:
        for side in (self.hypothesis, self.conclusion):
            if sort_of(side) != Sort.BOOL:
                raise ValueError(f"Entailment sides must be formulas, got {side}")
        _collect_sorts(self.hypothesis.free_vars() | self.conclusion.free_vars())

    @property
    def free_sorts(self) -> dict[str, Sort]:
        return _collect_sorts(self.hypothesis.free_vars() | self.conclusion.free_vars())

    def refutation(self) -> Expr:
        return conj([self.hypothesis, Neg(self.conclusion)])


@dataclass
class SolverStats:
    queries: int = 0
    cache_hits: int = 0
    smt_calls: int = 0
    unknowns: int = 0
    time_ms: float = 0.0

    def as_dict(self) -> dict[str, float]:
        return {
            "queries": self.queries,
            "cache_hits": self.cache_hits,
            "smt_calls": self.smt_calls,
            "unknowns": self.unknowns,
            "time_ms": round(self.time_ms, 3),
        }


class _Undecided(Exception):
    """The cube could be neither refuted nor satisfied."""


@dataclass
class _Cube:
    bools: dict[str, bool] = field(default_factory=dict)
    perm_literals: list[Expr] = field(default_factory=list)
    opaque: list[Expr] = field(default_factory=list)


class PureSolver:
    """
    Decision procedure for the pure fragment.

    One instance per search; not thread-safe. ``smt`` is consulted only for
    queries the built-in procedure leaves Unknown.
    """

    def __init__(self, config: SolverConfig, smt: SmtBackend | None = None) -> None:
        self.config = config
        self.smt = smt
        self.stats = SolverStats()
        self._cache: dict[tuple[Expr, Expr], ValidityResult] = {}

    # --- public API ---------------------------------------------------------

    def valid(self, query: EntailmentQuery) -> Verdict:
        return self.check_validity(query).verdict

    def entails(self, hypothesis: Expr, conclusion: Expr) -> bool:
        return self.valid(EntailmentQuery(hypothesis, conclusion)) == Verdict.VALID

    def is_unsat(self, formula: Expr) -> bool:
        return self.check_sat(formula).status == SatStatus.UNSAT

    def check_validity(self, query: EntailmentQuery) -> ValidityResult:
        key = (query.hypothesis, query.conclusion)
        cached = self._cache.get(key)
        if cached is not None:
            self.stats.cache_hits += 1
            return cached
        sat = self.check_sat(query.refutation())
        if sat.status == SatStatus.UNSAT:
            result = ValidityResult(Verdict.VALID)
        elif sat.status == SatStatus.SAT:
            result = ValidityResult(Verdict.INVALID, sat.model)
        else:
            result = ValidityResult(Verdict.UNKNOWN)
        self._cache[key] = result
        return result

    def check_sat(self, formula: Expr) -> SatResult:
        started = time.perf_counter()
        self.stats.queries += 1
        try:
            result = self._check_builtin(formula)
            if result.status == SatStatus.UNKNOWN and self.smt is not None:
                result = self._check_external(formula)
            if result.status == SatStatus.UNKNOWN:
                self.stats.unknowns += 1
                logger.debug("Pure query left undecided: %s", formula)
            return result
        finally:
            self.stats.time_ms += (time.perf_counter() - started) * 1000

    # --- pipeline ------------------------------------------------------------

    def _check_external(self, formula: Expr) -> SatResult:
        self.stats.smt_calls += 1
        answer = self.smt.check_sat(formula) if self.smt else SmtAnswer.UNKNOWN
        if answer == SmtAnswer.UNSAT:
            return SatResult(SatStatus.UNSAT)
        if answer == SmtAnswer.SAT:
            return SatResult(SatStatus.SAT)
        return SatResult(SatStatus.UNKNOWN)

    def _check_builtin(self, formula: Expr) -> SatResult:
        simple = simplify(formula)
        if simple == FALSE:
            return SatResult(SatStatus.UNSAT)
        try:
            cubes = dnf(nnf(simple), self.config.max_cubes)
        except TooManyCubes as exc:
            logger.debug("DNF cap reached (%s)", exc)
            return SatResult(SatStatus.UNKNOWN)
        undecided = False
        for literals in cubes:
            try:
                model = self._solve_cube(literals, formula)
            except (CongruenceConflict, SetConflict, Infeasible):
                continue
            except (_Undecided, ArithBlowup) as exc:
                logger.debug("Cube undecided: %s", exc)
                undecided = True
                continue
            return SatResult(SatStatus.SAT, model)
        return SatResult(SatStatus.UNKNOWN if undecided else SatStatus.UNSAT)

    def _solve_cube(self, literals: list[Expr], formula: Expr) -> dict[str, Value]:
        cube = _Cube()
        closure = CongruenceClosure()
        sets = SetConstraints()
        linear = LinearSystem(self.config.max_fm_constraints)

        for literal in literals:
            self._classify(literal, cube, closure, sets, linear)

        sets.eliminate()
        for left, right in sets.element_equalities:
            closure.merge(left, right)
            self._add_linear(Op.EQ, left, right, linear, cube, literal=None)
        linear.eliminate_equalities()

        def element_key(term: Expr) -> object:
            form = linearize(term)
            return linear.canonical(form) if form is not None else term

        sets.check(element_key)
        numeric = linear.solve()
        if numeric is None:
            raise _Undecided("no integer model constructed")

        env: dict[str, Value] = {}
        sorts = _free_sorts(formula)
        env.update(numeric)
        _assign_free_ints(env, sorts)
        for name, sort in sorts.items():
            if sort == Sort.BOOL:
                env[name] = cube.bools.get(name, False)

        perm_options = self._perm_assignments(cube, sorts)
        return self._search_residual(env, sorts, sets, perm_options, literals, formula)

    def _classify(
        self,
        literal: Expr,
        cube: _Cube,
        closure: CongruenceClosure,
        sets: SetConstraints,
        linear: LinearSystem,
    ) -> None:
        positive = not isinstance(literal, Neg)
        atom = literal if positive else literal.arg
        if isinstance(atom, Var) and atom.sort == Sort.BOOL:
            if cube.bools.setdefault(atom.name, positive) != positive:
                raise CongruenceConflict(f"{atom.name} and not {atom.name}")
            return
        if not isinstance(atom, BinOp):
            cube.opaque.append(literal)
            return
        left_sort, right_sort = sort_of(atom.lhs), sort_of(atom.rhs)
        if atom.op == Op.EQ:
            if positive:
                closure.merge(atom.lhs, atom.rhs)
            else:
                closure.assert_distinct(atom.lhs, atom.rhs)
            if Sort.SET in (left_sort, right_sort):
                (sets.add_eq if positive else sets.add_ne)(atom.lhs, atom.rhs)
            elif Sort.PERM in (left_sort, right_sort):
                cube.perm_literals.append(literal)
            elif left_sort.numeric and right_sort.numeric:
                self._add_linear(Op.EQ, atom.lhs, atom.rhs, linear, cube, literal, positive)
            else:
                cube.opaque.append(literal)
            return
        if atom.op in (Op.LE, Op.LT) and positive:
            self._add_linear(atom.op, atom.lhs, atom.rhs, linear, cube, literal)
            return
        cube.opaque.append(literal)

    @staticmethod
    def _add_linear(
        op: Op,
        lhs: Expr,
        rhs: Expr,
        linear: LinearSystem,
        cube: _Cube,
        literal: Expr | None,
        positive: bool = True,
    ) -> None:
        left, right = linearize(lhs), linearize(rhs)
        if left is None or right is None:
            if literal is not None:
                cube.opaque.append(literal)
            return
        difference = left - right
        if op == Op.EQ:
            (linear.add_eq if positive else linear.add_ne)(difference)
        elif op == Op.LE:
            linear.add_le(difference)
        else:
            linear.add_le(difference + Linear.constant(1))

    @staticmethod
    def _perm_assignments(cube: _Cube, sorts: Mapping[str, Sort]) -> list[dict[str, str]]:
        """Every permission valuation satisfying the cube's permission literals."""
        names = sorted(n for n, s in sorts.items() if s == Sort.PERM)
        if not names:
            if any(not holds(lit, {}) for lit in cube.perm_literals):
                raise CongruenceConflict("ground permission literal is false")
            return [{}]
        if 2 ** len(names) > _MAX_ENUMERATION:
            raise _Undecided(f"{len(names)} permission variables")
        options: list[dict[str, str]] = []
        for values in itertools.product(_PERM_VALUES, repeat=len(names)):
            env = dict(zip(names, values))
            if all(holds(lit, env) for lit in cube.perm_literals):
                options.append(env)
        if not options:
            raise CongruenceConflict("permission literals are unsatisfiable")
        return options

    def _search_residual(
        self,
        env: dict[str, Value],
        sorts: Mapping[str, Sort],
        sets: SetConstraints,
        perm_options: list[dict[str, str]],
        literals: list[Expr],
        formula: Expr,
    ) -> dict[str, Value]:
        set_names = sorted(n for n, s in sorts.items() if s == Sort.SET)
        defined = {var.name: term for var, term in sets.definitions.items()}
        residual = [n for n in set_names if n not in defined]
        universe = _universe(env, sets, self.config.set_enum_universe)
        subsets = _subsets(universe)
        combinations = len(perm_options) * len(subsets) ** len(residual)
        if combinations > _MAX_ENUMERATION:
            raise _Undecided(f"{combinations} residual valuations")

        for perms in perm_options:
            for chosen in itertools.product(subsets, repeat=len(residual)):
                candidate = dict(env)
                candidate.update(perms)
                candidate.update(zip(residual, chosen))
                try:
                    for name, term in defined.items():
                        candidate[name] = evaluate(term, candidate)
                    if all(holds(lit, candidate) for lit in literals) and holds(
                        formula, candidate
                    ):
                        return candidate
                except (KeyError, TypeError):
                    continue
        raise _Undecided("no certified model")


def _free_sorts(formula: Expr) -> dict[str, Sort]:
    return {var.name: var.sort for var in sorted(formula.free_vars(), key=lambda v: v.name)}


def _assign_free_ints(env: dict[str, Value], sorts: Mapping[str, Sort]) -> None:
    """Unconstrained numeric variables get pairwise distinct small values."""
    taken = {v for v in env.values() if isinstance(v, int) and not isinstance(v, bool)}
    counter = itertools.count()
    for name, sort in sorts.items():
        if sort.numeric and name not in env:
            value = next(counter)
            while value in taken:
                value = next(counter)
            taken.add(value)
            env[name] = value


def _universe(env: Mapping[str, Value], sets: SetConstraints, size: int) -> list[int]:
    values = set(range(size))
    for left, right in sets.equalities + sets.disequalities:
        for term in (left, right):
            for var in term.free_vars():
                value = env.get(var.name)
                if isinstance(value, int) and not isinstance(value, bool):
                    values.add(value)
            for const in _int_constants(term):
                values.add(const)
    return sorted(values)


def _int_constants(term: Expr) -> Iterable[int]:
    if isinstance(term, IntConst):
        yield term.value
    elif isinstance(term, SetLit):
        for elem in term.elems:
            yield from _int_constants(elem)
    elif isinstance(term, BinOp):
        yield from _int_constants(term.lhs)
        yield from _int_constants(term.rhs)


def _subsets(universe: list[int]) -> list[frozenset]:
    return [
        frozenset(combo)
        for width in range(len(universe) + 1)
        for combo in itertools.combinations(universe, width)
    ]


def _collect_sorts(variables: Iterable[Var]) -> dict[str, Sort]:
    sorts: dict[str, Sort] = {}
    for var in sorted(variables, key=lambda v: v.name):
        known = sorts.setdefault(var.name, var.sort)
        if known != var.sort and not (known.numeric and var.sort.numeric):
            raise ValueError(
                f"Variable '{var.name}' used as both {known.value} and {var.sort.value}"
            )
    return sorts
