"""Checkers and evaluator for a light multithreaded lambda calculus with regions.

Programs are passed as source text, in the same syntax as the `lmt` tool.
"""

from ._lmt import (
    ParseError,
    bound,
    decode_nat,
    depth,
    format,
    nat,
    run,
    run_cells,
    size,
    typecheck,
    unfold,
    wellformed,
)

__all__ = [
    "ParseError",
    "bound",
    "decode_nat",
    "depth",
    "format",
    "nat",
    "run",
    "run_cells",
    "size",
    "typecheck",
    "unfold",
    "wellformed",
]
