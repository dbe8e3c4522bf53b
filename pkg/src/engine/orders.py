"""
Rule orders. Order 0 is the default phase order; orders 1..6 move WriteRO
(first, after unification, last) and Open/Call (high, low).

The order ranks rules inside a phase: while a predicate instance remains
on either side only Frame, UnifyHeaps, Open, Close and Call act on it, and
the heap-level rules take over once none is left. Read is invertible and
runs ahead of every order.
"""
from __future__ import annotations

from itertools import product

from ..config import RULE_ORDERS
from .rules import RULES, Rule

DEFAULT_ORDER = (
    "Emp",
    "Frame",
    "Open",
    "Close",
    "UnifyHeaps",
    "Pick",
    "Read",
    "WriteRO",
    "Alloc",
    "Free",
    "Call",
)

WRITE_PRIORITIES = ("first", "after-unify", "last")
OPEN_CALL_PRIORITIES = ("high", "low")

_CORE = ("Frame", "Close", "UnifyHeaps", "Pick", "Read", "Alloc", "Free")


def _variant(write: str, open_call: str) -> tuple[str, ...]:
    names = list(_CORE)
    if open_call == "high":
        names = ["Open", "Call", *names]
    else:
        names = [*names, "Open", "Call"]
    if write == "first":
        names.insert(0, "WriteRO")
    elif write == "after-unify":
        names.insert(names.index("Pick") + 1, "WriteRO")
    else:
        names.append("WriteRO")
    return ("Emp", *names)


ORDERS: tuple[tuple[str, ...], ...] = (DEFAULT_ORDER,) + tuple(
    _variant(write, open_call)
    for write, open_call in product(WRITE_PRIORITIES, OPEN_CALL_PRIORITIES)
)

assert len(ORDERS) == RULE_ORDERS


def rule_order(order: int) -> list[Rule]:
    if not 0 <= order < len(ORDERS):
        raise ValueError(f"Unknown rule order {order}; expected 0..{len(ORDERS) - 1}")
    return [RULES[name] for name in ORDERS[order]]


def describe_order(order: int) -> str:
    if order == 0:
        return "default"
    write, open_call = list(product(WRITE_PRIORITIES, OPEN_CALL_PRIORITIES))[order - 1]
    return f"write {write}, open/call {open_call}"
