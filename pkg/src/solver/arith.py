"""
Linear integer arithmetic: linear forms, Gaussian elimination of equalities
and Fourier-Motzkin elimination with integer tightening.

Every infeasibility reported here is sound over the integers. Feasibility is
only ever claimed through an explicit integer assignment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from ..core import BinOp, Expr, IntConst, Op, Var


class ArithBlowup(Exception):
    """Fourier-Motzkin produced more constraints than allowed."""


@dataclass(frozen=True)
class Linear:
    """``sum(coeff * var) + const`` with nonzero coefficients sorted by name."""

    coeffs: tuple[tuple[str, Fraction], ...]
    const: Fraction

    @classmethod
    def of(cls, coeffs: Mapping[str, Fraction], const: Fraction | int = 0) -> Linear:
        items = tuple(sorted((k, Fraction(v)) for k, v in coeffs.items() if v != 0))
        return cls(items, Fraction(const))

    @classmethod
    def constant(cls, value: Fraction | int) -> Linear:
        return cls((), Fraction(value))

    @classmethod
    def variable(cls, name: str) -> Linear:
        return cls(((name, Fraction(1)),), Fraction(0))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def coeff(self, name: str) -> Fraction:
        for key, value in self.coeffs:
            if key == name:
                return value
        return Fraction(0)

    def vars(self) -> list[str]:
        return [k for k, _ in self.coeffs]

    def is_const(self) -> bool:
        return not self.coeffs

    def __add__(self, other: Linear) -> Linear:
        merged = self.as_dict()
        for key, value in other.coeffs:
            merged[key] = merged.get(key, Fraction(0)) + value
        return Linear.of(merged, self.const + other.const)

    def __sub__(self, other: Linear) -> Linear:
        return self + other.scale(-1)

    def scale(self, factor: Fraction | int) -> Linear:
        factor = Fraction(factor)
        return Linear.of({k: v * factor for k, v in self.coeffs}, self.const * factor)

    def substitute(self, name: str, image: Linear) -> Linear:
        factor = self.coeff(name)
        if factor == 0:
            return self
        rest = Linear.of({k: v for k, v in self.coeffs if k != name}, self.const)
        return rest + image.scale(factor)

    def evaluate(self, values: Mapping[str, int]) -> Fraction:
        return self.const + sum((v * values[k] for k, v in self.coeffs), Fraction(0))

    def integral(self) -> Linear:
        """Positive multiple with integer coefficients and constant."""
        denominators = [v.denominator for _, v in self.coeffs] + [self.const.denominator]
        return self.scale(math.lcm(*denominators))


def linearize(expr: Expr) -> Linear | None:
    """Linear form of an integer term, or None outside the fragment."""
    if isinstance(expr, IntConst):
        return Linear.constant(expr.value)
    if isinstance(expr, Var):
        return Linear.variable(expr.name)
    if isinstance(expr, BinOp) and expr.op in (Op.PLUS, Op.MINUS):
        left = linearize(expr.lhs)
        right = linearize(expr.rhs)
        if left is None or right is None:
            return None
        return left + right if expr.op == Op.PLUS else left - right
    return None


def tighten(constraint: Linear) -> Linear:
    """Integer tightening of ``constraint <= 0``."""
    scaled = constraint.integral()
    if scaled.is_const():
        return scaled
    divisor = math.gcd(*(int(v) for _, v in scaled.coeffs))
    if divisor <= 1:
        return scaled
    coeffs = {k: v / divisor for k, v in scaled.coeffs}
    return Linear.of(coeffs, math.ceil(scaled.const / divisor))


class Infeasible(Exception):
    """The constraint system has no integer solution."""


class LinearSystem:
    """
    Conjunction of ``L == 0``, ``L <= 0`` and ``L != 0`` constraints.

    ``solve`` raises ``Infeasible`` on a sound contradiction and otherwise
    returns an integer model or None when no model could be constructed.
    """

    def __init__(self, max_constraints: int) -> None:
        self.max_constraints = max_constraints
        self.equalities: list[Linear] = []
        self.inequalities: list[Linear] = []
        self.disequalities: list[Linear] = []
        # var -> definition in terms of the remaining variables
        self.definitions: dict[str, Linear] = {}

    def add_eq(self, form: Linear) -> None:
        self.equalities.append(form)

    def add_le(self, form: Linear) -> None:
        self.inequalities.append(form)

    def add_ne(self, form: Linear) -> None:
        self.disequalities.append(form)

    # --- equalities -------------------------------------------------------

    def eliminate_equalities(self) -> None:
        pending = list(self.equalities)
        while pending:
            form = self._apply_definitions(pending.pop(0))
            if form.is_const():
                if form.const != 0:
                    raise Infeasible(f"{form.const} == 0")
                continue
            scaled = form.integral()
            divisor = math.gcd(*(int(v) for _, v in scaled.coeffs))
            if scaled.const % divisor != 0:
                raise Infeasible("equality has no integer solution")
            # prefer a unit coefficient so definitions stay integral
            name = next(
                (k for k, v in scaled.coeffs if abs(v) == 1),
                scaled.coeffs[0][0],
            )
            factor = scaled.coeff(name)
            rest = Linear.of({k: v for k, v in scaled.coeffs if k != name}, scaled.const)
            image = rest.scale(Fraction(-1) / factor)
            for key in list(self.definitions):
                self.definitions[key] = self.definitions[key].substitute(name, image)
            self.definitions[name] = image
        self.equalities = []
        self.inequalities = [self._apply_definitions(f) for f in self.inequalities]
        self.disequalities = [self._apply_definitions(f) for f in self.disequalities]

    def _apply_definitions(self, form: Linear) -> Linear:
        for name, image in self.definitions.items():
            form = form.substitute(name, image)
        return form

    def canonical(self, form: Linear) -> Linear:
        """Representative of ``form`` modulo the eliminated equalities."""
        return self._apply_definitions(form)

    # --- inequalities -----------------------------------------------------

    def _eliminate(self, constraints: list[Linear]) -> list[tuple[str, list[Linear]]]:
        """Fourier-Motzkin levels; raises Infeasible on a false ground constraint."""
        current = self._dedup(constraints)
        names = sorted({name for form in current for name in form.vars()})
        levels: list[tuple[str, list[Linear]]] = []
        for name in names:
            levels.append((name, current))
            lower = [f for f in current if f.coeff(name) < 0]
            upper = [f for f in current if f.coeff(name) > 0]
            rest = [f for f in current if f.coeff(name) == 0]
            combined = list(rest)
            for low in lower:
                for up in upper:
                    a = up.coeff(name)
                    b = -low.coeff(name)
                    combined.append(up.scale(b) + low.scale(a))
            current = self._dedup(combined)
            if len(current) > self.max_constraints:
                raise ArithBlowup(f"{len(current)} constraints after eliminating {name}")
        return levels

    def _dedup(self, constraints: Iterable[Linear]) -> list[Linear]:
        seen: dict[Linear, None] = {}
        for form in constraints:
            tight = tighten(form)
            if tight.is_const():
                if tight.const > 0:
                    raise Infeasible(f"{tight.const} <= 0")
                continue
            seen.setdefault(tight, None)
        return list(seen)

    def feasible(self, extra: Iterable[Linear] = ()) -> bool:
        """False only when the inequalities (plus ``extra``) are infeasible."""
        try:
            self._eliminate(self.inequalities + list(extra))
        except Infeasible:
            return False
        return True

    def check_disequalities(self) -> None:
        """A disequality whose expression the inequalities force to zero is a conflict."""
        for form in self.disequalities:
            if form.is_const():
                if form.const == 0:
                    raise Infeasible("0 != 0")
                continue
            below = form + Linear.constant(1)
            above = form.scale(-1) + Linear.constant(1)
            if not self.feasible([below]) and not self.feasible([above]):
                raise Infeasible(f"inequalities force {form} == 0")

    def solve(self, preferred: Mapping[str, int] | None = None) -> dict[str, int] | None:
        """Full pipeline; the returned model satisfies every constraint."""
        self.eliminate_equalities()
        levels = self._eliminate(self.inequalities)
        self.check_disequalities()
        return self._build_model(levels, preferred or {})

    def _build_model(
        self,
        levels: list[tuple[str, list[Linear]]],
        preferred: Mapping[str, int],
    ) -> dict[str, int] | None:
        model: dict[str, int] = {}
        for name, constraints in reversed(levels):
            low: Fraction | None = None
            high: Fraction | None = None
            for form in constraints:
                factor = form.coeff(name)
                if factor == 0:
                    continue
                rest = Linear.of({k: v for k, v in form.coeffs if k != name}, form.const)
                if any(k not in model for k in rest.vars()):
                    return None
                bound = -rest.evaluate(model) / factor
                if factor > 0:
                    high = bound if high is None else min(high, bound)
                else:
                    low = bound if low is None else max(low, bound)
            lo = math.ceil(low) if low is not None else None
            hi = math.floor(high) if high is not None else None
            if lo is not None and hi is not None and lo > hi:
                return None
            value = self._pick(name, lo, hi, model, preferred.get(name, 0))
            if value is None:
                return None
            model[name] = value

        free = sorted(
            {k for f in self.disequalities for k in f.vars()}
            | {k for d in self.definitions.values() for k in d.vars()}
        )
        for name in free:
            if name not in model:
                value = self._pick(name, None, None, model, preferred.get(name, 0))
                if value is None:
                    return None
                model[name] = value

        for name, image in self.definitions.items():
            value = image.evaluate(model)
            if value.denominator != 1:
                return None
            model[name] = int(value)
        if any(f.evaluate(model) == 0 for f in self.disequalities):
            return None
        return model

    def _pick(
        self,
        name: str,
        lo: int | None,
        hi: int | None,
        model: Mapping[str, int],
        preferred: int,
    ) -> int | None:
        forbidden: set[Fraction] = set()
        for form in self.disequalities:
            factor = form.coeff(name)
            if factor == 0:
                continue
            rest = Linear.of({k: v for k, v in form.coeffs if k != name}, form.const)
            if all(k in model for k in rest.vars()):
                forbidden.add(-rest.evaluate(model) / factor)
        center = preferred
        if lo is not None and center < lo:
            center = lo
        if hi is not None and center > hi:
            center = hi
        for distance in range(len(forbidden) + 2):
            for candidate in (center + distance, center - distance):
                if lo is not None and candidate < lo:
                    continue
                if hi is not None and candidate > hi:
                    continue
                if Fraction(candidate) not in forbidden:
                    return candidate
        return None
