"""
Well-formedness of predicate definitions and function specifications.

A predicate may only mention the borrow variables it declares; a function
spec may not introduce borrow variables in its postcondition.
"""
from __future__ import annotations

from dataclasses import dataclass

from .context import FunctionSpec, PredicateDef
from .terms import Sort


@dataclass(frozen=True)
class Violation:
    """One well-formedness failure, e.g. an unbound borrow in clause 2."""

    owner: str
    variable: str
    message: str

    def __str__(self) -> str:
        return f"{self.owner}: {self.message}"


class WellFormednessError(ValueError):
    """Raised by the front end when a definition fails well-formedness."""

    def __init__(self, violations: list[Violation]) -> None:
        self.violations = violations
        lines = "\n".join(f"  - {v}" for v in violations)
        super().__init__(f"Well-formedness check failed:\n{lines}")


def check_pred_well_formed(definition: PredicateDef) -> list[Violation]:
    """Empty list iff every permission variable of every clause is a parameter."""
    bound = {v.name for v in definition.perm_params}
    violations: list[Violation] = []
    for index, clause in enumerate(definition.clauses, start=1):
        free_perms = sorted(
            {v.name for v in clause.free_vars() if v.sort == Sort.PERM} - bound
        )
        for name in free_perms:
            violations.append(
                Violation(
                    owner=definition.name,
                    variable=name,
                    message=f"clause {index} uses unbound permission variable '{name}'",
                )
            )
    return violations


def check_spec_well_formed(spec: FunctionSpec) -> list[Violation]:
    """Empty list iff the postcondition has no existential borrow variables."""
    violations = [
        Violation(
            owner=spec.name,
            variable=var.name,
            message=f"postcondition introduces existential permission variable '{var.name}'",
        )
        for var in sorted(spec.existentials(), key=lambda v: v.name)
        if var.sort == Sort.PERM
    ]
    return violations
