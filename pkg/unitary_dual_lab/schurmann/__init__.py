"""Schurmann triple of the Levy process on the unitary dual group."""

from .triple import (
    CrosscheckResult,
    GaussianityReport,
    SchurmannVector,
    WordFunctionalValue,
    base_values,
    crosscheck_sweep,
    ell,
    eta,
    gaussianity_check,
    generator_crosscheck,
    kernel_generators,
    pi,
)

__all__ = [
    "SchurmannVector",
    "WordFunctionalValue",
    "GaussianityReport",
    "CrosscheckResult",
    "eta",
    "ell",
    "pi",
    "kernel_generators",
    "gaussianity_check",
    "generator_crosscheck",
    "crosscheck_sweep",
    "base_values",
]
