"""Free-limit moments of the block process on the dual group ``U<n>``.

The value ``phi(tr(w1) ... tr(wr))`` of a trace-tuple evolves in the time of
its latest letters by a linear generator: every active letter contributes
``-1/2`` on the diagonal and every pair of active letters inside one trace
contributes a rewritten tuple with coefficient ``-(1/n)(-1)^(eps_p + eps_q)``.
Letters at earlier times are inert and ride along inside the rewritten
segments. Multi-time values are obtained by recursion on the number of
distinct times, integrating from the second-latest time to the latest.

The rewrite rules for a trace ``A P B Q C`` with active letters ``P`` before
``Q`` are (``a`` runs over ``1..n`` in the mixed cases, which need
``i_P = i_Q``):

* ``P, Q`` plain:   ``tr(A u[iP,jQ] C) tr(u[iQ,jP] B)``
* ``P, Q`` starred: ``tr(A u*[iQ,jP] C) tr(B u*[iP,jQ])``
* ``P`` plain, ``Q`` starred: ``tr(A C) tr(u[a,jP] B u*[a,jQ])``
* ``P`` starred, ``Q`` plain: ``tr(A u*[a,jP] u[a,jQ] C) tr(B)``

Empty traces are the constant 1 and are dropped.
"""

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from threading import Lock
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import InvalidArgumentError, StateExplosionError
from ..core.ode import DEFAULT_RTOL, DENSE_CROSSOVER, SparseSystem, propagate
from ..logging.logger import EngineCallLogger, get_logger
from ..logging.metrics import get_metrics_collector, track_performance
from ..words.trace_words import (
    Letter,
    TraceTuple,
    TraceWord,
    canonicalize,
    counit,
    counit_eval,
    restamp,
    split_traces,
    tuple_from_traces,
    validate_indices,
)

logger = get_logger("moments.free_engine")

DEFAULT_MAX_STATES = 100_000

Row = Dict[TraceTuple, Fraction]
Combination = List[Tuple[Fraction, TraceTuple]]


def _pair_rewrites(
    p: Letter,
    q: Letter,
    a: Tuple[Letter, ...],
    b: Tuple[Letter, ...],
    c: Tuple[Letter, ...],
    n: int,
) -> List[List[List[Letter]]]:
    t = p.time_id
    if p.eps == 0 and q.eps == 0:
        return [[[*a, Letter(t, p.i, q.j, 0), *c], [Letter(t, q.i, p.j, 0), *b]]]
    if p.eps == 1 and q.eps == 1:
        return [[[*a, Letter(t, q.i, p.j, 1), *c], [*b, Letter(t, p.i, q.j, 1)]]]
    if p.i != q.i:
        return []
    if p.eps == 0:
        return [
            [[*a, *c], [Letter(t, k, p.j, 0), *b, Letter(t, k, q.j, 1)]] for k in range(1, n + 1)
        ]
    return [[[*a, Letter(t, k, p.j, 1), Letter(t, k, q.j, 0), *c], [*b]] for k in range(1, n + 1)]


def apply_generator(state: TraceTuple, n: int, active_time: int) -> Row:
    """Generator row of ``state`` with the letters of slot ``active_time`` evolving.

    Args:
        state: Trace-tuple (canonicalized on entry)
        n: Block count
        active_time: Time slot whose letters are active

    Returns:
        ``{target_tuple: coefficient}`` with exact rational coefficients
    """
    state = canonicalize(state)
    row: Dict[TraceTuple, Fraction] = defaultdict(Fraction)
    active_count = sum(1 for letter in state.letters() if letter.time_id == active_time)
    if active_count:
        row[state] += Fraction(-active_count, 2)

    for kappa, trace in enumerate(state.traces):
        others = [list(other.letters) for idx, other in enumerate(state.traces) if idx != kappa]
        letters = trace.letters
        positions = [idx for idx, letter in enumerate(letters) if letter.time_id == active_time]
        for offset, p in enumerate(positions):
            for q in positions[offset + 1 :]:
                first, second = letters[p], letters[q]
                sign = -1 if (first.eps + second.eps) % 2 else 1
                coefficient = Fraction(-sign, n)
                segments = (letters[:p], letters[p + 1 : q], letters[q + 1 :])
                for new_traces in _pair_rewrites(first, second, *segments, n):
                    target = tuple_from_traces(others + new_traces, state.times)
                    row[target] += coefficient

    return {target: value for target, value in row.items() if value != 0}


@dataclass
class GeneratorSystem:
    """Closed state set with its generator over one active time slot."""

    n: int
    active_time: int
    states: List[TraceTuple]
    rows: List[Dict[int, Fraction]] = field(repr=False)
    initial: Optional[np.ndarray] = field(default=None, repr=False)
    _sparse: Optional[SparseSystem] = field(default=None, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return len(self.states)

    @property
    def index(self) -> Dict[TraceTuple, int]:
        return {state: idx for idx, state in enumerate(self.states)}

    @property
    def sparse(self) -> SparseSystem:
        if self._sparse is None:
            self._sparse = SparseSystem.from_rows(
                [{col: float(value) for col, value in row.items()} for row in self.rows]
            )
        return self._sparse

    def verify_closed(self) -> bool:
        """Whether every row only refers to states of the system."""
        return all(0 <= col < self.dimension for row in self.rows for col in row)

    def counit_vector(self) -> np.ndarray:
        return np.array([counit_eval(state) for state in self.states], dtype=complex)

    def with_times(self, times: Sequence[str]) -> "GeneratorSystem":
        """The same system with every state moved onto a new time table."""
        return GeneratorSystem(
            n=self.n,
            active_time=self.active_time,
            states=[state.with_times(times) for state in self.states],
            rows=self.rows,
            initial=self.initial,
            _sparse=self._sparse,
        )


def build_closure(
    seeds: Sequence[TraceTuple],
    n: int,
    active_time: int,
    max_states: int = DEFAULT_MAX_STATES,
) -> GeneratorSystem:
    """Breadth-first closure of ``seeds`` under :func:`apply_generator`.

    Seeds come first in the state order, followed by new states in discovery
    order.

    Raises:
        StateExplosionError: If more than ``max_states`` states are needed
    """
    states: List[TraceTuple] = []
    index: Dict[TraceTuple, int] = {}
    origin: Dict[TraceTuple, TraceTuple] = {}
    queue: deque = deque()

    def add(state: TraceTuple, seed: TraceTuple) -> int:
        if state not in index:
            if len(states) >= max_states:
                raise StateExplosionError(
                    f"closure of {seed} exceeded {max_states} states",
                    seed=str(seed),
                    states=len(states),
                )
            index[state] = len(states)
            states.append(state)
            origin[state] = seed
            queue.append(state)
        return index[state]

    for seed in seeds:
        seed = validate_indices(canonicalize(seed), n)
        add(seed, seed)

    rows: Dict[int, Dict[int, Fraction]] = {}
    while queue:
        state = queue.popleft()
        row = apply_generator(state, n, active_time)
        rows[index[state]] = {add(target, origin[state]): value for target, value in row.items()}

    metrics = get_metrics_collector()
    metrics.increment("free_engine.states_built", len(states))
    metrics.max_gauge("free_engine.largest_closure", len(states))
    return GeneratorSystem(
        n=n, active_time=active_time, states=states, rows=[rows[i] for i in range(len(states))]
    )


@dataclass(frozen=True)
class MomentQuery:
    """A trace-tuple together with the block count it is evaluated at."""

    word: TraceTuple
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "word", validate_indices(canonicalize(self.word), self.n))


def _structural(tup: TraceTuple) -> TraceTuple:
    """Same letters over placeholder times ``0, 1, ...``; closures only depend on this."""
    return tup.with_times([str(k) for k in range(len(tup.times))])


def _time_gap(start: str, stop: str) -> float:
    return float(Decimal(stop) - Decimal(start))


class FreeMomentEngine:
    """Memoizing evaluator of free-limit moments.

    Closures are cached per structure (letters and time slots, not time
    values) and every solved state value is memoized on its canonical tuple.
    Both caches are safe to share between threads.
    """

    def __init__(
        self,
        max_states: int = DEFAULT_MAX_STATES,
        rtol: float = DEFAULT_RTOL,
        crossover: int = DENSE_CROSSOVER,
        method: str = "auto",
    ):
        """Initialize the engine.

        Args:
            max_states: State budget of a single closure
            rtol: Relative tolerance passed to the propagator
            crossover: Largest closure propagated with a dense exponential
            method: Propagation backend, see :func:`propagate`
        """
        if max_states < 1:
            raise InvalidArgumentError(f"max_states must be positive, got {max_states}")
        self.max_states = max_states
        self.rtol = rtol
        self.crossover = crossover
        self.method = method
        self._memo: Dict[Tuple[TraceTuple, int], complex] = {}
        self._closures: Dict[Tuple[TraceTuple, int, int], GeneratorSystem] = {}
        self._lock = Lock()
        self._metrics = get_metrics_collector()

    def _lookup(self, tup: TraceTuple, n: int) -> Optional[complex]:
        with self._lock:
            value = self._memo.get((tup, n))
        self._metrics.increment(
            "free_engine.memo_hits" if value is not None else "free_engine.memo_misses"
        )
        return value

    def _store(self, tup: TraceTuple, n: int, value: complex) -> complex:
        with self._lock:
            return self._memo.setdefault((tup, n), value)

    def clear(self) -> None:
        """Drop all memoized values and closures."""
        with self._lock:
            self._memo.clear()
            self._closures.clear()

    @property
    def memo_size(self) -> int:
        return len(self._memo)

    def closure(self, seed: TraceTuple, n: int, active_time: int) -> GeneratorSystem:
        """Cached closure of one seed, placed on the seed's own time table."""
        seed = canonicalize(seed)
        key = (_structural(seed), n, active_time)
        with self._lock:
            system = self._closures.get(key)
        if system is None:
            with EngineCallLogger(logger, "build_closure", str(seed)) as call:
                system = build_closure([key[0]], n, active_time, self.max_states)
                call.states = system.dimension
            with self._lock:
                system = self._closures.setdefault(key, system)
        return system.with_times(seed.times)

    @track_performance("free_engine.solve_single_time")
    def solve_single_time(self, query: MomentQuery, t: float) -> complex:
        """Value at time ``t`` of a single-time query, starting from ``U_0 = I``.

        Raises:
            InvalidArgumentError: If the query uses more than one time or ``t < 0``
            StateExplosionError: If the closure exceeds the state budget
        """
        if t < 0:
            raise InvalidArgumentError(f"time must be non-negative, got {t}")
        word = query.word
        if len(word.times) != 1:
            raise InvalidArgumentError(
                f"solve_single_time needs a single-time word, got times {word.times}"
            )
        word = word.with_times([t])
        if word.is_empty:
            return 1.0 + 0.0j
        cached = self._lookup(word, query.n)
        if cached is not None:
            return cached

        system = self.closure(word, query.n, 0)
        initial = system.counit_vector()
        values = propagate(
            system.sparse,
            initial,
            float(word.times[0]),
            rtol=self.rtol,
            method=self.method,
            crossover=self.crossover,
        )
        for state, value in zip(system.states, values):
            self._store(state, query.n, complex(value))
        return complex(values[system.index[word]])

    def _evaluate(self, word: TraceTuple, n: int) -> complex:
        word = canonicalize(word)
        if word.is_empty:
            return 1.0 + 0.0j
        cached = self._lookup(word, n)
        if cached is not None:
            return cached

        if len(word.traces) > 1:
            value = math.prod((self._evaluate(part, n) for part in split_traces(word)), start=1 + 0j)
            return self._store(word, n, value)
        if len(word.times) == 1:
            return self.solve_single_time(MomentQuery(word, n), float(word.times[0]))

        active = len(word.times) - 1
        system = self.closure(word, n, active)
        initial = np.array(
            [self._evaluate(restamp(state, {active: active - 1}), n) for state in system.states],
            dtype=complex,
        )
        values = propagate(
            system.sparse,
            initial,
            _time_gap(word.times[-2], word.times[-1]),
            rtol=self.rtol,
            method=self.method,
            crossover=self.crossover,
        )
        for state, value in zip(system.states, values):
            self._store(state, n, complex(value))
        return complex(values[system.index[word]])

    @track_performance("free_engine.evaluate_multitime")
    def evaluate_multitime(self, query: MomentQuery) -> complex:
        """Value of a query with any number of distinct times.

        Raises:
            StateExplosionError: If a closure exceeds the state budget
        """
        with EngineCallLogger(logger, "evaluate_multitime", str(query.word)):
            return self._evaluate(query.word, query.n)

    def evaluate(self, word: TraceTuple, n: int) -> complex:
        """Shorthand for :meth:`evaluate_multitime` on a bare tuple."""
        return self.evaluate_multitime(MomentQuery(word, n))

    def evaluate_combination(self, terms: Sequence[Tuple[Fraction, TraceTuple]], n: int) -> complex:
        """Linear combination of tuple values."""
        return sum((complex(c) * self.evaluate(tup, n) for c, tup in terms), start=0j)


_default_engine: Optional[FreeMomentEngine] = None
_default_lock = Lock()


def default_engine() -> FreeMomentEngine:
    """Process-wide engine used by the module-level helpers.

    Its memo and closure cache are unbounded and live as long as the process;
    call :func:`reset_default_engine` to release them.
    """
    global _default_engine
    with _default_lock:
        if _default_engine is None:
            _default_engine = FreeMomentEngine()
        return _default_engine


def reset_default_engine() -> None:
    """Drop the values and closures cached by the process-wide engine."""
    with _default_lock:
        if _default_engine is not None:
            _default_engine.clear()


def solve_single_time(query: MomentQuery, t: float) -> complex:
    """Module-level :meth:`FreeMomentEngine.solve_single_time`."""
    return default_engine().solve_single_time(query, t)


def evaluate_multitime(query: MomentQuery) -> complex:
    """Module-level :meth:`FreeMomentEngine.evaluate_multitime`."""
    return default_engine().evaluate_multitime(query)


def derivative_at_zero(word: TraceTuple, n: int) -> Fraction:
    """``d/dt phi_t(word)`` at ``t = 0``: the generator row against the counit.

    Raises:
        InvalidArgumentError: If the word uses more than one time
    """
    word = validate_indices(canonicalize(word), n)
    if len(word.times) != 1:
        raise InvalidArgumentError("derivative_at_zero needs a single-time word")
    row = apply_generator(word, n, 0)
    return sum((value * counit(target) for target, value in row.items()), start=Fraction(0))


def first_moment_closed_form(i: int, j: int, t: float) -> float:
    """``phi_t(u_ij) = delta_ij exp(-t/2)``."""
    return math.exp(-t / 2) if i == j else 0.0


def second_moment_closed_form(i: int, j: int, k: int, l: int, n: int, t: float) -> float:
    """``phi_t(u_ij u_kl)`` obtained by integrating its scalar equation from ``delta_ij delta_kl``."""
    return (float(i == j and k == l) - (t / n) * float(i == l and k == j)) * math.exp(-t)


def relation_sum(i: int, j: int, n: int, side: str = "row", time: str = "0") -> Combination:
    """Terms of a defining relation of ``U<n>``; their sum equals ``delta_ij``.

    Args:
        i: First free index
        j: Second free index
        n: Block count
        side: ``row`` for ``sum_k u_ik u_jk*``, ``column`` for ``sum_k u_ki* u_kj``
        time: Time of every letter
    """
    if side not in ("row", "column"):
        raise InvalidArgumentError(f"side must be 'row' or 'column', got {side!r}")
    terms: Combination = []
    for k in range(1, n + 1):
        if side == "row":
            letters = (Letter(0, i, k, 0), Letter(0, j, k, 1))
        else:
            letters = (Letter(0, k, i, 1), Letter(0, k, j, 0))
        tup = canonicalize(TraceTuple((TraceWord(letters),), (time,)))
        terms.append((Fraction(1), validate_indices(tup, n)))
    return terms


def mixed_second_moment_system(n: int) -> GeneratorSystem:
    """Closed system of the ``n^4`` functions ``phi_t(u_ij u_kl*)``.

    States are ordered by ``(i, j, k, l)`` in lexicographic order.
    """
    seeds = [
        canonicalize(TraceTuple.single((Letter(0, i, j, 0), Letter(0, k, l, 1))))
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        for k in range(1, n + 1)
        for l in range(1, n + 1)
    ]
    return build_closure(seeds, n, 0, max_states=len(seeds))


def mixed_second_moment_equilibrium(n: int) -> np.ndarray:
    """The vector ``delta_ik delta_jl`` over :func:`mixed_second_moment_system` states."""
    return np.array(
        [
            float(i == k and j == l)
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            for k in range(1, n + 1)
            for l in range(1, n + 1)
        ]
    )
