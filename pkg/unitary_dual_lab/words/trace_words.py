"""Letters, trace-words and trace-tuples.

A trace-tuple is a formal product of normalized traces of words in the blocks
``u_ij`` (and their adjoints ``u_ij*``) of the process, each letter stamped with
a time. It is the index of every moment function in the package.
"""

from dataclasses import dataclass, replace
from decimal import Decimal, InvalidOperation
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from ..core.exceptions import IndexOutOfRangeError, InvalidArgumentError, MalformedWordError

TimeLike = Union[str, int, float, Decimal]


@dataclass(frozen=True, order=True)
class Letter:
    """One block letter ``u_ij`` (eps=0) or ``u_ij*`` (eps=1) at a time slot.

    Field order fixes the letter ordering ``(time_id, i, j, eps)`` used for
    canonical rotations.
    """

    time_id: int
    i: int
    j: int
    eps: int = 0

    def __post_init__(self) -> None:
        if self.eps not in (0, 1):
            raise MalformedWordError(f"star flag must be 0 or 1, got {self.eps}")
        if self.i < 1 or self.j < 1:
            raise IndexOutOfRangeError(f"letter indices must be positive, got ({self.i}, {self.j})")
        if self.time_id < 0:
            raise MalformedWordError(f"time_id must be non-negative, got {self.time_id}")

    def star(self) -> "Letter":
        """The adjoint letter."""
        return replace(self, eps=1 - self.eps)

    def restamp(self, time_id: int) -> "Letter":
        return replace(self, time_id=time_id)

    @property
    def is_diagonal(self) -> bool:
        return self.i == self.j

    def text(self, stamp: Optional[str] = None) -> str:
        """Render as ``u12*``, optionally with an ``@`` time stamp."""
        body = f"u{self.i}{self.j}{'*' if self.eps else ''}"
        return f"{body}@{stamp}" if stamp is not None else body


def _rotations(letters: Tuple[Letter, ...]) -> Iterator[Tuple[Letter, ...]]:
    for k in range(len(letters)):
        yield letters[k:] + letters[:k]


@dataclass(frozen=True)
class TraceWord:
    """Letters under one normalized trace, read cyclically."""

    letters: Tuple[Letter, ...]

    def __post_init__(self) -> None:
        if not self.letters:
            raise MalformedWordError("a trace must contain at least one letter")
        object.__setattr__(self, "letters", tuple(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def canonical(self) -> "TraceWord":
        """Lexicographically minimal rotation."""
        return TraceWord(min(_rotations(self.letters)))

    def adjoint(self) -> "TraceWord":
        """``(ab)* = b* a*``: reverse the word and flip every star."""
        return TraceWord(tuple(letter.star() for letter in reversed(self.letters)))

    def key(self) -> str:
        """Sort key of a trace; includes every letter's time slot."""
        return " ".join(f"{letter.text()}@{letter.time_id}" for letter in self.letters)


def normalize_time(value: TimeLike) -> str:
    """Exact decimal text of a time value, e.g. ``0.50`` -> ``0.5``.

    Raises:
        MalformedWordError: If the value is not a finite non-negative number
    """
    try:
        number = Decimal(str(value))
    except (InvalidOperation, ValueError) as e:
        raise MalformedWordError(f"invalid time value {value!r}") from e
    if not number.is_finite() or number < 0:
        raise MalformedWordError(f"times must be finite and non-negative, got {value!r}")
    text = format(number.normalize(), "f")
    return "0" if text in ("-0", "") else text


@dataclass(frozen=True)
class TraceTuple:
    """Product of normalized traces over a table of distinct, increasing times."""

    traces: Tuple[TraceWord, ...]
    times: Tuple[str, ...] = ("0",)

    def __post_init__(self) -> None:
        object.__setattr__(self, "traces", tuple(self.traces))
        object.__setattr__(self, "times", tuple(normalize_time(t) for t in self.times))
        if not self.times:
            raise MalformedWordError("a trace-tuple needs at least one time")
        values = [Decimal(t) for t in self.times]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise MalformedWordError(f"times must be strictly increasing, got {self.times}")
        for trace in self.traces:
            for letter in trace.letters:
                if letter.time_id >= len(self.times):
                    raise MalformedWordError(
                        f"letter {letter.text()} refers to time slot {letter.time_id} "
                        f"but only {len(self.times)} times are defined"
                    )

    @classmethod
    def single(cls, letters: Iterable[Letter], time: TimeLike = "0") -> "TraceTuple":
        """One trace at one time."""
        return cls((TraceWord(tuple(letters)),), (normalize_time(time),))

    @property
    def is_empty(self) -> bool:
        """The empty product of traces, whose value is 1."""
        return not self.traces

    @property
    def total_length(self) -> int:
        return sum(len(trace) for trace in self.traces)

    @property
    def time_values(self) -> List[float]:
        return [float(t) for t in self.times]

    def letters(self) -> Iterator[Letter]:
        for trace in self.traces:
            yield from trace.letters

    def used_time_ids(self) -> List[int]:
        return sorted({letter.time_id for letter in self.letters()})

    def max_index(self) -> int:
        return max((max(letter.i, letter.j) for letter in self.letters()), default=0)

    def with_times(self, times: Sequence[TimeLike]) -> "TraceTuple":
        """Same letters over a new time table of the same length."""
        if len(times) != len(self.times):
            raise InvalidArgumentError(
                f"expected {len(self.times)} times, got {len(times)}"
            )
        return TraceTuple(self.traces, tuple(normalize_time(t) for t in times))

    def __str__(self) -> str:
        from .parser import format_tuple

        return format_tuple(self)


def canonicalize(tup: TraceTuple) -> TraceTuple:
    """Unique representative under trace rotation and trace permutation.

    Each trace is rotated to its minimal rotation, traces are sorted by their
    key, and time slots no letter refers to are removed from the table.

    Raises:
        MalformedWordError: If any trace is empty
    """
    used = tup.used_time_ids()
    if used and used != list(range(len(tup.times))):
        remap = {old: new for new, old in enumerate(used)}
        traces = tuple(
            TraceWord(tuple(letter.restamp(remap[letter.time_id]) for letter in trace.letters))
            for trace in tup.traces
        )
        times = tuple(tup.times[old] for old in used)
    else:
        traces, times = tup.traces, tup.times
    rotated = sorted((trace.canonical() for trace in traces), key=TraceWord.key)
    return TraceTuple(tuple(rotated), times)


def adjoint(tup: TraceTuple) -> TraceTuple:
    """Adjoint of every trace (the value is the complex conjugate)."""
    return canonicalize(TraceTuple(tuple(trace.adjoint() for trace in tup.traces), tup.times))


def counit(tup: TraceTuple) -> int:
    """Counit as an exact integer: product of ``delta_ij`` over all letters."""
    return int(all(letter.is_diagonal for letter in tup.letters()))


def counit_eval(tup: TraceTuple) -> complex:
    """Value of the tuple at the identity, the ``t = 0`` base value of every moment."""
    return complex(counit(tup))


def validate_indices(tup: TraceTuple, n: int) -> TraceTuple:
    """Check every letter index against the block count ``n``.

    Raises:
        InvalidArgumentError: If ``n`` is not a positive integer
        IndexOutOfRangeError: If an index lies outside ``1..n``
    """
    if n < 1:
        raise InvalidArgumentError(f"block count n must be at least 1, got {n}")
    for letter in tup.letters():
        if letter.i > n or letter.j > n:
            raise IndexOutOfRangeError(
                f"letter {letter.text()} has an index outside 1..{n}"
            )
    return tup


def restamp(tup: TraceTuple, mapping: Mapping[int, int]) -> TraceTuple:
    """Move letters between time slots and canonicalize the result.

    Args:
        tup: Tuple to restamp
        mapping: ``{old_time_id: new_time_id}``; unmapped slots are kept

    Returns:
        Canonical tuple over the same time table with unused slots dropped
    """
    traces = tuple(
        TraceWord(
            tuple(letter.restamp(mapping.get(letter.time_id, letter.time_id)) for letter in trace.letters)
        )
        for trace in tup.traces
    )
    return canonicalize(TraceTuple(traces, tup.times))


def split_traces(tup: TraceTuple) -> List[TraceTuple]:
    """One canonical single-trace tuple per trace of ``tup``."""
    return [canonicalize(TraceTuple((trace,), tup.times)) for trace in tup.traces]


def tuple_from_traces(traces: Iterable[Sequence[Letter]], times: Sequence[str]) -> TraceTuple:
    """Canonical tuple from raw letter sequences; empty sequences are dropped."""
    words = tuple(TraceWord(tuple(letters)) for letters in traces if letters)
    return canonicalize(TraceTuple(words, tuple(times)))


def letter_counts(tup: TraceTuple) -> Dict[int, int]:
    """Number of letters per time slot."""
    counts: Dict[int, int] = {}
    for letter in tup.letters():
        counts[letter.time_id] = counts.get(letter.time_id, 0) + 1
    return counts
