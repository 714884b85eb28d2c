"""Shared numerical kernel and error types."""

from .exceptions import (
    ConfigurationError,
    IndexOutOfRangeError,
    IntegratorFailureError,
    InvalidArgumentError,
    LabError,
    MalformedWordError,
    NumericalFailureError,
    StateExplosionError,
    WordSyntaxError,
)
from .ode import SparseSystem, propagate, stationarity_residual

__all__ = [
    "LabError",
    "MalformedWordError",
    "WordSyntaxError",
    "IndexOutOfRangeError",
    "InvalidArgumentError",
    "NumericalFailureError",
    "StateExplosionError",
    "IntegratorFailureError",
    "ConfigurationError",
    "SparseSystem",
    "propagate",
    "stationarity_residual",
]
