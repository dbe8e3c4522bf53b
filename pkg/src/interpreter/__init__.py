"""
Concrete execution of synthesized programs and randomized validation.
"""
from .machine import Execution, Fault, Frame, Machine, State, meta, run
from .models import Model, ModelBuilder, random_model
from .satisfaction import Satisfaction, satisfies, solve_equation, try_evaluate
from .validator import (
    SampleResult,
    ValidationReport,
    Validator,
    check_ro_preservation,
    format_model,
)

__all__ = [
    # machine
    "Machine",
    "State",
    "Frame",
    "Execution",
    "Fault",
    "meta",
    "run",
    # satisfaction
    "Satisfaction",
    "satisfies",
    "solve_equation",
    "try_evaluate",
    # models
    "Model",
    "ModelBuilder",
    "random_model",
    # validation
    "Validator",
    "ValidationReport",
    "SampleResult",
    "check_ro_preservation",
    "format_model",
]
