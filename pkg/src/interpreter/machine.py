"""
Small-step machine for synthesized programs.

The heap maps integer addresses to integer values. A block allocated at
``l`` stores its size in the meta cell ``l - 1``; ``free`` reads it back to
know how many cells to release. Permission annotations are never consulted.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..core import (
    Call,
    Error,
    Expr,
    Free,
    If,
    Load,
    Malloc,
    Procedure,
    Seq,
    Skip,
    Statement,
    Store,
    evaluate,
)
from ..specparser import print_statement

logger = logging.getLogger(__name__)


def meta(address: int) -> int:
    """Address of the size cell of the block starting at ``address``."""
    return address - 1


class Fault(Exception):
    """Execution went wrong: bad access, bad free, unknown callee or ``error``."""

    def __init__(self, reason: str, trace: Sequence[str] = ()) -> None:
        self.reason = reason
        self.trace = list(trace)
        super().__init__(reason)


@dataclass
class Frame:
    stack: dict[str, int]
    # statements still to run, next one last
    work: list[Statement]


@dataclass
class State:
    heap: dict[int, int]
    frames: list[Frame]
    ro: frozenset[int] = frozenset()
    blocks: set[int] = field(default_factory=set)
    next_address: int = 1
    steps: int = 0
    ro_writes: list[int] = field(default_factory=list)

    @property
    def finished(self) -> bool:
        return not self.frames

    def clone(self) -> State:
        frames = [Frame(dict(f.stack), list(f.work)) for f in self.frames]
        return State(
            dict(self.heap),
            frames,
            self.ro,
            set(self.blocks),
            self.next_address,
            self.steps,
            list(self.ro_writes),
        )

    def allocate(self, size: int) -> int:
        address = self.next_address + 1
        self.heap[meta(address)] = size
        for offset in range(size):
            self.heap[address + offset] = 0
        self.blocks.add(address)
        # one spare cell keeps the next meta cell clear of this block
        self.next_address = address + size + 1
        return address


@dataclass
class Execution:
    state: State
    trace: list[str]


class Machine:
    """Runs procedures of one program; ``fuel`` bounds the number of steps."""

    def __init__(self, procedures: Mapping[str, Procedure], fuel: int) -> None:
        self.procedures = dict(procedures)
        self.fuel = fuel
        self.trace: list[str] = []

    def initial_state(
        self,
        entry: str,
        args: Sequence[int],
        heap: Mapping[int, int],
        ro: frozenset[int] = frozenset(),
        blocks: frozenset[int] = frozenset(),
    ) -> State:
        procedure = self._lookup(entry)
        if len(args) != len(procedure.formals):
            raise Fault(f"{entry} expects {len(procedure.formals)} arguments, got {len(args)}")
        missing = sorted(ro - heap.keys())
        if missing:
            raise ValueError(f"Read-only locations outside the heap: {missing}")
        stack = dict(zip(procedure.formal_names, args))
        start = max(heap, default=0) + 2
        return State(
            dict(heap),
            [Frame(stack, [procedure.body])],
            ro,
            set(blocks),
            start,
        )

    def run(self, state: State) -> Execution:
        self.trace = []
        while not state.finished:
            if state.steps >= self.fuel:
                raise Fault(f"out of fuel after {self.fuel} steps", self.trace)
            self.step(state)
        return Execution(state, self.trace)

    def step(self, state: State) -> State:
        """One transition; mutates and returns ``state``."""
        if state.finished:
            raise ValueError("No frame to step")
        frame = state.frames[-1]
        if not frame.work:
            state.frames.pop()
            return state
        stmt = frame.work.pop()
        state.steps += 1
        try:
            self._execute(stmt, frame, state)
        except Fault as exc:
            raise Fault(exc.reason, self.trace) from None
        return state

    def _execute(self, stmt: Statement, frame: Frame, state: State) -> None:
        if isinstance(stmt, Skip):
            return
        if isinstance(stmt, Seq):
            frame.work.extend(reversed(stmt.stmts))
            return
        if isinstance(stmt, If):
            taken = self._truth(stmt.cond, frame)
            self._record(f"if ({stmt.cond}) -> {'then' if taken else 'else'}")
            frame.work.append(stmt.then if taken else stmt.orelse)
            return
        self._record(print_statement(stmt))
        if isinstance(stmt, Load):
            address = self._int(stmt.base, frame) + stmt.offset
            frame.stack[stmt.var] = self._read(state, address)
        elif isinstance(stmt, Store):
            address = self._int(stmt.base, frame) + stmt.offset
            if address not in state.heap:
                raise Fault(f"write to unallocated address {address}")
            if address in state.ro:
                state.ro_writes.append(address)
            state.heap[address] = self._int(stmt.value, frame)
        elif isinstance(stmt, Malloc):
            frame.stack[stmt.var] = state.allocate(stmt.size)
        elif isinstance(stmt, Free):
            self._free(state, self._int(stmt.target, frame))
        elif isinstance(stmt, Call):
            callee = self._lookup(stmt.name)
            if len(stmt.args) != len(callee.formals):
                raise Fault(f"{stmt.name} called with {len(stmt.args)} arguments")
            values = [self._int(arg, frame) for arg in stmt.args]
            state.frames.append(Frame(dict(zip(callee.formal_names, values)), [callee.body]))
        elif isinstance(stmt, Error):
            raise Fault("reached an error statement")
        else:
            raise TypeError(f"Unknown statement: {stmt!r}")

    def _lookup(self, name: str) -> Procedure:
        if name not in self.procedures:
            raise Fault(f"call to unknown procedure '{name}'")
        return self.procedures[name]

    def _free(self, state: State, address: int) -> None:
        if address not in state.blocks or meta(address) not in state.heap:
            raise Fault(f"free of non-block address {address}")
        size = state.heap.pop(meta(address))
        for offset in range(size):
            if state.heap.pop(address + offset, None) is None:
                raise Fault(f"block at {address} lost cell {address + offset} before free")
        state.blocks.discard(address)

    @staticmethod
    def _read(state: State, address: int) -> int:
        if address not in state.heap:
            raise Fault(f"read from unallocated address {address}")
        return state.heap[address]

    @staticmethod
    def _int(expr: Expr, frame: Frame) -> int:
        try:
            value = evaluate(expr, frame.stack)
        except KeyError as exc:
            raise Fault(f"unbound program variable {exc.args[0]}") from None
        if isinstance(value, bool) or not isinstance(value, int):
            raise Fault(f"expected an integer for {expr}, got {value!r}")
        return value

    @staticmethod
    def _truth(expr: Expr, frame: Frame) -> bool:
        try:
            value = evaluate(expr, frame.stack)
        except KeyError as exc:
            raise Fault(f"unbound program variable {exc.args[0]}") from None
        if not isinstance(value, bool):
            raise Fault(f"condition {expr} is not boolean")
        return value

    def _record(self, text: str) -> None:
        self.trace.append(text)


def run(
    procedures: Mapping[str, Procedure],
    entry: str,
    args: Sequence[int],
    heap: Mapping[int, int],
    ro: frozenset[int] = frozenset(),
    fuel: int = 100_000,
    blocks: frozenset[int] = frozenset(),
) -> Execution:
    """
    Run ``entry`` to completion.

    Raises:
        Fault: with the statements executed so far in ``trace``
    """
    machine = Machine(procedures, fuel)
    state = machine.initial_state(entry, args, heap, ro, blocks)
    execution = machine.run(state)
    logger.debug("%s finished after %d steps", entry, execution.state.steps)
    return execution
