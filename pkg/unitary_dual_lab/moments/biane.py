"""Integer-partition moment systems for a single block (n = 1).

For ``U`` a Brownian motion on ``U(d)`` the functions
``f_p(t) = E[tr(U^k1) ... tr(U^kr)]`` indexed by partitions ``p = (k1, ..., kr)``
of a fixed weight solve a closed linear system. At finite ``d`` the system
carries ``1/d^2`` merge terms; they vanish in the free limit.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import InvalidArgumentError, MalformedWordError
from ..core.ode import DEFAULT_RTOL, SparseSystem, propagate
from ..logging.logger import get_logger
from ..words.trace_words import TraceTuple

logger = get_logger("moments.biane")


@dataclass(frozen=True, order=True)
class Partition:
    """Non-increasing tuple of positive parts."""

    parts: Tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(self.parts)
        if not parts or any(p < 1 for p in parts):
            raise InvalidArgumentError(f"partition parts must be positive, got {parts}")
        object.__setattr__(self, "parts", tuple(sorted(parts, reverse=True)))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ", ".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class Regime:
    """Finite block size ``d`` or the ``d -> infinity`` limit (``d is None``)."""

    d: Optional[int] = None

    def __post_init__(self) -> None:
        if self.d is not None and self.d < 1:
            raise InvalidArgumentError(f"block size d must be at least 1, got {self.d}")

    @classmethod
    def finite(cls, d: int) -> "Regime":
        return cls(d)

    @classmethod
    def limit(cls) -> "Regime":
        return cls(None)

    @property
    def is_limit(self) -> bool:
        return self.d is None

    def __str__(self) -> str:
        return "limit" if self.d is None else f"finite(d={self.d})"


@lru_cache(maxsize=None)
def _partitions(k: int, largest: int) -> Tuple[Tuple[int, ...], ...]:
    if k == 0:
        return ((),)
    result: List[Tuple[int, ...]] = []
    for first in range(min(k, largest), 0, -1):
        result.extend((first,) + rest for rest in _partitions(k - first, first))
    return tuple(result)


def enumerate_partitions(k: int) -> List[Partition]:
    """All partitions of ``k`` in lexicographically descending order.

    Raises:
        InvalidArgumentError: If ``k < 1``
    """
    if k < 1:
        raise InvalidArgumentError(f"partition weight must be at least 1, got {k}")
    return [Partition(parts) for parts in _partitions(k, k)]


@dataclass(frozen=True)
class PartitionSystem:
    """Generator over all partitions of ``k`` with exact rational rows."""

    k: int
    regime: Regime
    states: Tuple[Partition, ...]
    rows: Tuple[Dict[Partition, Fraction], ...] = field(repr=False)

    @property
    def index(self) -> Dict[Partition, int]:
        return {p: idx for idx, p in enumerate(self.states)}

    def row(self, partition: Partition) -> Dict[Partition, Fraction]:
        return self.rows[self.index[partition]]

    def to_sparse(self) -> SparseSystem:
        index = self.index
        return SparseSystem.from_rows(
            [{index[p]: float(c) for p, c in row.items()} for row in self.rows]
        )

    def matrix(self) -> np.ndarray:
        """Dense real generator."""
        return self.to_sparse().to_dense().real


def _replace_part(parts: Tuple[int, ...], position: int, new: Sequence[int]) -> Partition:
    return Partition(parts[:position] + tuple(new) + parts[position + 1 :])


def generator_row(partition: Partition, regime: Regime) -> Dict[Partition, Fraction]:
    """Row of the generator for one partition.

    Diagonal ``-k/2``; for each part ``m`` and ``l = 1..m-1`` a split term
    ``-(m - l)`` into the partition with ``m`` replaced by ``(m - l, l)``; in
    the finite regime, for each pair of parts a merge term ``-m1 m2 / d^2``
    into the partition with both parts replaced by their sum.
    """
    row: Dict[Partition, Fraction] = {partition: Fraction(-partition.weight, 2)}
    parts = partition.parts
    for position, m in enumerate(parts):
        for l in range(1, m):
            target = _replace_part(parts, position, (m - l, l))
            row[target] = row.get(target, Fraction(0)) - (m - l)
    if not regime.is_limit:
        d2 = regime.d * regime.d  # type: ignore[operator]
        for a in range(len(parts)):
            for b in range(a + 1, len(parts)):
                rest = parts[:a] + parts[a + 1 : b] + parts[b + 1 :]
                target = Partition(rest + (parts[a] + parts[b],))
                row[target] = row.get(target, Fraction(0)) - Fraction(parts[a] * parts[b], d2)
    return {p: c for p, c in row.items() if c != 0}


def build_generator(k: int, regime: Regime) -> PartitionSystem:
    """Assemble the partition system of weight ``k``."""
    states = tuple(enumerate_partitions(k))
    rows = tuple(generator_row(p, regime) for p in states)
    logger.debug(f"Built partition system k={k} {regime}: {len(states)} states")
    return PartitionSystem(k=k, regime=regime, states=states, rows=rows)


def solve_moments(
    k: int, t: float, regime: Regime, rtol: float = DEFAULT_RTOL
) -> Dict[Partition, complex]:
    """Moments of every partition of ``k`` at time ``t``, starting from ``U_0 = I``.

    Raises:
        InvalidArgumentError: If ``t`` is negative
        NumericalFailureError: If the propagation fails
    """
    if t < 0:
        raise InvalidArgumentError(f"time must be non-negative, got {t}")
    system = build_generator(k, regime)
    values = propagate(system.to_sparse(), np.ones(len(system.states)), t, rtol=rtol, method="dense")
    return {p: complex(v) for p, v in zip(system.states, values)}


def d1_oracle(partition: Partition, t: float) -> complex:
    """Exact value at ``d = 1``, where ``U_t = exp(i B_t)``."""
    return complex(math.exp(-(partition.weight**2) * t / 2))


def partition_of(tup: TraceTuple) -> Optional[Partition]:
    """Partition indexing a single-block, single-time tuple.

    All letters are the same unitary, so each trace reduces to ``tr(U^m)``
    with ``m`` the number of plain minus starred letters, and ``m = 0`` is the
    constant 1. A tuple whose powers are all negative is the conjugate of the
    positive one, which has a real value. Returns ``None`` when every trace
    reduces to 1.

    Raises:
        MalformedWordError: If the tuple has more than one time, an index other
            than 1, or powers of both signs
    """
    if len(tup.used_time_ids()) > 1:
        raise MalformedWordError("partition systems only describe single-time words")
    if tup.max_index() > 1:
        raise MalformedWordError("partition systems only describe n = 1 words")
    powers = [sum(1 - 2 * letter.eps for letter in trace.letters) for trace in tup.traces]
    powers = [m for m in powers if m != 0]
    if any(m > 0 for m in powers) and any(m < 0 for m in powers):
        raise MalformedWordError("partition systems do not mix tr(U^m) and tr(U*^m) factors")
    return Partition(tuple(abs(m) for m in powers)) if powers else None


def tuple_moment(tup: TraceTuple, t: float, regime: Regime) -> complex:
    """Value of an ``n = 1`` tuple at time ``t`` from the partition system."""
    partition = partition_of(tup)
    if partition is None:
        return 1.0 + 0.0j
    return solve_moments(partition.weight, t, regime)[partition]


@dataclass
class FiniteSizeScan:
    """Exact finite-``d`` biases against the free limit."""

    partition: Partition
    t: float
    limit_value: float
    rows: List[Dict[str, float]]
    slope: Optional[float]


def finite_size_scan(partition: Partition, t: float, d_list: Sequence[int]) -> FiniteSizeScan:
    """Exact ``|f^(d) - f|`` for each ``d`` with the fitted log-log slope.

    The slope is fitted over the ``d`` values with a non-zero bias; it is
    ``None`` when fewer than two remain.
    """
    k = partition.weight
    limit_value = solve_moments(k, t, Regime.limit())[partition].real
    rows = []
    for d in d_list:
        value = solve_moments(k, t, Regime.finite(d))[partition].real
        rows.append({"d": d, "value": value, "limit": limit_value, "bias": abs(value - limit_value)})
    usable = [(r["d"], r["bias"]) for r in rows if r["bias"] > 0]
    slope = None
    if len(usable) >= 2:
        ds, biases = zip(*usable)
        slope = float(np.polyfit(np.log(ds), np.log(biases), 1)[0])
    return FiniteSizeScan(partition=partition, t=t, limit_value=limit_value, rows=rows, slope=slope)
