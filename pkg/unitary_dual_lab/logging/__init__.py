"""Logging and metrics utilities for Unitary Dual Lab."""

from .logger import (
    EngineCallLogger,
    PerformanceLogger,
    get_logger,
    log_engine_call,
    log_performance,
    setup_logging,
)
from .metrics import MetricsCollector, get_metrics_collector, track_performance

__all__ = [
    "get_logger",
    "setup_logging",
    "log_engine_call",
    "log_performance",
    "EngineCallLogger",
    "PerformanceLogger",
    "MetricsCollector",
    "get_metrics_collector",
    "track_performance",
]
