"""Exact moment systems: single-block partitions and the free engine."""

from .biane import Partition, Regime, build_generator, d1_oracle, enumerate_partitions, solve_moments
from .free_engine import (
    FreeMomentEngine,
    GeneratorSystem,
    MomentQuery,
    apply_generator,
    build_closure,
    derivative_at_zero,
    evaluate_multitime,
    solve_single_time,
)

__all__ = [
    "Partition",
    "Regime",
    "enumerate_partitions",
    "build_generator",
    "solve_moments",
    "d1_oracle",
    "FreeMomentEngine",
    "GeneratorSystem",
    "MomentQuery",
    "apply_generator",
    "build_closure",
    "solve_single_time",
    "evaluate_multitime",
    "derivative_at_zero",
]
