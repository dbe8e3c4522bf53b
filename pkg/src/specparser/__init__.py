"""
Spec-file front end and program printer.
"""
from .lexer import SpecParseError, tokenize
from .loader import load_program, load_spec
from .parser import SpecFile, parse_program, parse_spec
from .printer import (
    ast_size,
    print_function,
    print_predicate,
    print_program,
    print_spec,
    print_statement,
)

__all__ = [
    # parsing
    "SpecFile",
    "SpecParseError",
    "tokenize",
    "parse_spec",
    "parse_program",
    "load_spec",
    "load_program",
    # printing
    "print_spec",
    "print_predicate",
    "print_function",
    "print_program",
    "print_statement",
    "ast_size",
]
