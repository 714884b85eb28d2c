"""Run metrics: solver counters, state-space gauges and timings."""

import time
from collections import defaultdict
from dataclasses import asdict, dataclass
from functools import wraps
from threading import Lock
from typing import Any, Callable, Dict, Optional, TypeVar

F = TypeVar("F", bound=Callable[..., Any])


@dataclass
class TimingStats:
    """Accumulated wall time of one operation."""

    count: int = 0
    errors: int = 0
    total_time: float = 0.0
    min_time: float = float("inf")
    max_time: float = 0.0

    def update(self, duration: float, failed: bool = False) -> None:
        """Fold one call into the statistics."""
        self.count += 1
        self.errors += int(failed)
        self.total_time += duration
        self.min_time = min(self.min_time, duration)
        self.max_time = max(self.max_time, duration)

    @property
    def avg_time(self) -> float:
        return self.total_time / self.count if self.count else 0.0

    def as_dict(self) -> Dict[str, float]:
        data = asdict(self)
        data["avg_time"] = self.avg_time
        if self.count == 0:
            data["min_time"] = 0.0
        return data


class MetricsCollector:
    """Thread-safe collector shared by the engines and the CLI.

    Counters accumulate (memo hits, states built, paths simulated); gauges keep
    the last value (largest closure, current workers); timings aggregate
    per-operation wall time.
    """

    def __init__(self) -> None:
        self._counters: Dict[str, int] = defaultdict(int)
        self._gauges: Dict[str, float] = {}
        self._timings: Dict[str, TimingStats] = defaultdict(TimingStats)
        self._lock = Lock()

    def increment(self, name: str, value: int = 1) -> None:
        with self._lock:
            self._counters[name] += value

    def set_gauge(self, name: str, value: float) -> None:
        with self._lock:
            self._gauges[name] = value

    def max_gauge(self, name: str, value: float) -> None:
        """Keep the running maximum of a gauge."""
        with self._lock:
            self._gauges[name] = max(self._gauges.get(name, value), value)

    def record_timing(self, name: str, duration: float, failed: bool = False) -> None:
        with self._lock:
            self._timings[name].update(duration, failed)

    def get_counter(self, name: str) -> int:
        with self._lock:
            return self._counters.get(name, 0)

    def get_gauge(self, name: str) -> Optional[float]:
        with self._lock:
            return self._gauges.get(name)

    def get_timing(self, name: str) -> Optional[TimingStats]:
        with self._lock:
            return self._timings.get(name)

    def snapshot(self) -> Dict[str, Any]:
        """Return a JSON-ready copy of every metric."""
        with self._lock:
            return {
                "counters": dict(self._counters),
                "gauges": dict(self._gauges),
                "timings": {name: stats.as_dict() for name, stats in self._timings.items()},
            }

    def reset(self) -> None:
        with self._lock:
            self._counters.clear()
            self._gauges.clear()
            self._timings.clear()


_metrics_collector = MetricsCollector()


def get_metrics_collector() -> MetricsCollector:
    """Get the global metrics collector instance."""
    return _metrics_collector


def track_performance(operation_name: str) -> Callable[[F], F]:
    """Decorator recording call counts, failures and wall time of a function.

    Args:
        operation_name: Name under which the timing is stored

    Returns:
        Decorated function
    """

    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            failed = False
            try:
                return func(*args, **kwargs)
            except Exception:
                failed = True
                _metrics_collector.increment(f"{operation_name}.errors")
                raise
            finally:
                _metrics_collector.record_timing(
                    operation_name, time.perf_counter() - start_time, failed
                )

        return wrapper  # type: ignore[return-value]

    return decorator
