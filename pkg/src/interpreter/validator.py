"""
Randomized validation of synthesized procedures.

Each sample draws a model of the precondition, runs the procedure on it and
checks three things: no read-only location was written, freed or changed;
the run did not fault; the final heap satisfies the postcondition for some
values of its existential variables.
"""
from __future__ import annotations

import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..config import InterpreterConfig
from ..core import FunctionSpec, PredicateDef, Procedure
from .machine import Fault, run
from .models import Model, ModelBuilder
from .satisfaction import Satisfaction

logger = logging.getLogger(__name__)


def format_model(heap: Mapping[int, int], ro: Iterable[int]) -> str:
    """``addr: value`` lines in address order, then the read-only set."""
    lines = [f"{address}: {heap[address]}" for address in sorted(heap)]
    lines.append("RO: {" + ", ".join(str(a) for a in sorted(ro)) + "}")
    return "\n".join(lines)


@dataclass
class SampleResult:
    index: int
    model: Model | None
    passed: bool
    reason: str = ""
    trace: list[str] = field(default_factory=list)


@dataclass
class ValidationReport:
    procedure: str
    samples: list[SampleResult] = field(default_factory=list)

    @property
    def failures(self) -> list[SampleResult]:
        return [s for s in self.samples if s.model is not None and not s.passed]

    @property
    def skipped(self) -> int:
        """Samples for which no model of the precondition was found."""
        return sum(1 for s in self.samples if s.model is None)

    @property
    def passed(self) -> bool:
        return not self.failures and self.skipped < len(self.samples)

    def summary(self) -> str:
        checked = len(self.samples) - self.skipped
        return (
            f"{self.procedure}: {checked - len(self.failures)}/{checked} samples passed"
            f" ({self.skipped} without a model)"
        )

    def render(self) -> str:
        lines = [self.summary()]
        for sample in self.failures:
            assert sample.model is not None
            lines.append(f"sample {sample.index}: {sample.reason}")
            model_text = format_model(sample.model.heap, sample.model.ro)
            lines += ["  " + line for line in model_text.split("\n")]
            if sample.trace:
                lines.append("  trace:")
                lines += [f"    {step}" for step in sample.trace]
        return "\n".join(lines)


class Validator:
    """Validates one procedure (plus the procedures it may call) against its spec."""

    def __init__(
        self,
        procedures: Mapping[str, Procedure],
        spec: FunctionSpec,
        predicates: Mapping[str, PredicateDef],
        config: InterpreterConfig,
    ) -> None:
        if spec.name not in procedures:
            raise ValueError(f"No procedure named {spec.name} to validate")
        self.procedures = dict(procedures)
        self.spec = spec
        self.predicates = predicates
        self.config = config

    def check(self, samples: int, seed: int, workers: int = 1) -> ValidationReport:
        indices = range(samples)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda i: self.sample(i, seed), indices))
        else:
            results = [self.sample(i, seed) for i in indices]
        report = ValidationReport(self.spec.name, results)
        if report.passed:
            logger.info(report.summary())
        else:
            logger.warning(report.summary())
        return report

    def sample(self, index: int, seed: int) -> SampleResult:
        rng = random.Random(f"{seed}:{index}")
        builder = ModelBuilder(self.predicates, self.config, rng)
        model = builder.build(self.spec.pre, self.spec.formals)
        if model is None:
            return SampleResult(index, None, False, "no model of the precondition")
        try:
            execution = run(
                self.procedures,
                self.spec.name,
                model.args(self.spec.formals),
                model.heap,
                model.ro,
                self.config.fuel,
                model.blocks,
            )
        except Fault as exc:
            return SampleResult(index, model, False, f"fault: {exc.reason}", exc.trace)

        final = execution.state
        problem = _read_only_problem(model, final.heap, final.ro_writes)
        if problem is None and not self._post_holds(model, final.heap):
            problem = "final state does not satisfy the postcondition"
        if problem is not None:
            return SampleResult(index, model, False, problem, execution.trace)
        return SampleResult(index, model, True, trace=execution.trace)

    def _post_holds(self, model: Model, heap: Mapping[int, int]) -> bool:
        candidates = sorted(set(range(self.config.max_value + 1)) | set(heap.values()))
        checker = Satisfaction(self.predicates, model.ro, self.config.unfold_depth, candidates)
        return checker.holds(self.spec.post, heap, model.env)


def _read_only_problem(model: Model, heap: Mapping[int, int], writes: list[int]) -> str | None:
    if writes:
        return f"write to read-only location {writes[0]}"
    for address in sorted(model.ro):
        if address not in heap:
            return f"read-only location {address} was deallocated"
        if heap[address] != model.heap[address]:
            return (
                f"read-only location {address} changed from "
                f"{model.heap[address]} to {heap[address]}"
            )
    return None


def check_ro_preservation(
    procedures: Mapping[str, Procedure] | Iterable[Procedure],
    spec: FunctionSpec,
    predicates: Mapping[str, PredicateDef] | Iterable[PredicateDef],
    config: InterpreterConfig,
    samples: int,
    seed: int,
) -> ValidationReport:
    table = predicates if isinstance(predicates, Mapping) else {p.name: p for p in predicates}
    programs = (
        procedures if isinstance(procedures, Mapping) else {p.name: p for p in procedures}
    )
    return Validator(programs, spec, table, config).check(samples, seed)
