from __future__ import annotations

from .context import (
    Context,
    FunctionSpec,
    PredClause,
    PredicateDef,
    SynthGoal,
    classify_vars,
    existentials,
    fresh_name,
    fresh_var,
    goal_of,
)
from .evaluation import Value, evaluate, holds
from .heap import Assertion, Block, Heaplet, PointsTo, PredApp, emp, heaplet_key, kind_rank
from .program import (
    SKIP,
    Call,
    Error,
    Free,
    If,
    Load,
    Malloc,
    Procedure,
    Seq,
    Skip,
    Statement,
    Store,
    iter_statements,
    seq,
)
from .subst import IDENTITY, Substitution, apply_subst, free_vars
from .terms import (
    FALSE,
    IMM,
    MUT,
    TRUE,
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
    borrow,
    conj,
    conjuncts,
    disj,
    eq,
    format_expr,
    is_borrow,
    neq,
    plus,
    sort_of,
)
from .wellformed import (
    Violation,
    WellFormednessError,
    check_pred_well_formed,
    check_spec_well_formed,
)

__all__ = [
    # terms
    "Sort",
    "Op",
    "Expr",
    "IntConst",
    "BoolConst",
    "Var",
    "SetLit",
    "BinOp",
    "Neg",
    "PermConst",
    "MUT",
    "IMM",
    "TRUE",
    "FALSE",
    "borrow",
    "is_borrow",
    "sort_of",
    "eq",
    "neq",
    "plus",
    "conj",
    "conjuncts",
    "disj",
    "format_expr",
    # heap
    "PointsTo",
    "Block",
    "PredApp",
    "Heaplet",
    "Assertion",
    "emp",
    "heaplet_key",
    "kind_rank",
    # program
    "Load",
    "Store",
    "Malloc",
    "Free",
    "Call",
    "If",
    "Seq",
    "Skip",
    "Error",
    "SKIP",
    "Statement",
    "Procedure",
    "seq",
    "iter_statements",
    # context
    "PredClause",
    "PredicateDef",
    "FunctionSpec",
    "Context",
    "SynthGoal",
    "existentials",
    "classify_vars",
    "goal_of",
    "fresh_name",
    "fresh_var",
    # subst
    "Substitution",
    "IDENTITY",
    "apply_subst",
    "free_vars",
    # evaluation
    "Value",
    "evaluate",
    "holds",
    # wellformed
    "Violation",
    "WellFormednessError",
    "check_pred_well_formed",
    "check_spec_well_formed",
]
