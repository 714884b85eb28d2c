"""Trace-word language shared by every moment function."""

from .parser import format_tuple, parse_word
from .trace_words import (
    Letter,
    TraceTuple,
    TraceWord,
    adjoint,
    canonicalize,
    counit,
    counit_eval,
    normalize_time,
    restamp,
    split_traces,
    validate_indices,
)

__all__ = [
    "Letter",
    "TraceWord",
    "TraceTuple",
    "canonicalize",
    "adjoint",
    "counit",
    "counit_eval",
    "normalize_time",
    "restamp",
    "split_traces",
    "validate_indices",
    "parse_word",
    "format_tuple",
]
