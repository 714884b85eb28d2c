"""Text form of trace-tuples.

Grammar::

    tuple  := trace (';' trace)*
    trace  := 'tr(' letter (' ' letter)* ')'
    letter := 'u' i j ['*'] ['@' time]

``i`` and ``j`` are single digits. ``time`` is a non-negative decimal time
value; letters without a stamp sit at the default time. For ``n = 1`` the bare
letter ``u`` abbreviates ``u11``.
"""

import re
from decimal import Decimal
from typing import List, Optional, Tuple

from ..core.exceptions import WordSyntaxError
from .trace_words import (
    Letter,
    TimeLike,
    TraceTuple,
    TraceWord,
    canonicalize,
    normalize_time,
    validate_indices,
)

_TRACE = re.compile(r"\s*tr\(\s*([^()]*?)\s*\)\s*")
_LETTER = re.compile(
    r"u(?:(?P<i>\d)(?P<j>\d))?(?P<star>\*)?(?:@(?P<time>\d+(?:\.\d*)?|\.\d+))?"
)


def _parse_letter(token: str, n: int, default_time: str) -> Tuple[int, int, int, str]:
    match = _LETTER.fullmatch(token)
    if not match:
        raise WordSyntaxError(f"invalid letter {token!r}")
    if match.group("i") is None:
        if n != 1:
            raise WordSyntaxError(f"bare letter {token!r} is only allowed when n = 1")
        i = j = 1
    else:
        i, j = int(match.group("i")), int(match.group("j"))
    eps = 1 if match.group("star") else 0
    stamp = match.group("time")
    return i, j, eps, normalize_time(stamp) if stamp is not None else default_time


def parse_word(text: str, n: int, default_time: Optional[TimeLike] = None) -> TraceTuple:
    """Parse word text into a canonical trace-tuple.

    Args:
        text: Word text, e.g. ``"tr(u11 u22*); tr(u12@0.5 u21@1)"``
        n: Block count; indices must lie in ``1..n``
        default_time: Time of letters without an ``@`` stamp (``0`` if omitted)

    Returns:
        Canonical trace-tuple

    Raises:
        WordSyntaxError: If the text does not follow the grammar
        IndexOutOfRangeError: If an index lies outside ``1..n``
    """
    fallback = normalize_time(default_time if default_time is not None else 0)
    chunks = text.split(";")
    raw: List[List[Tuple[int, int, int, str]]] = []
    for chunk in chunks:
        match = _TRACE.fullmatch(chunk)
        if not match:
            raise WordSyntaxError(f"expected 'tr(...)', got {chunk.strip()!r}")
        body = match.group(1)
        tokens = body.split()
        if not tokens:
            raise WordSyntaxError("empty trace 'tr()'")
        raw.append([_parse_letter(token, n, fallback) for token in tokens])

    times = sorted({letter[3] for trace in raw for letter in trace}, key=Decimal)
    slot = {time: index for index, time in enumerate(times)}
    traces = tuple(
        TraceWord(tuple(Letter(slot[time], i, j, eps) for i, j, eps, time in trace))
        for trace in raw
    )
    return validate_indices(canonicalize(TraceTuple(traces, tuple(times))), n)


def format_tuple(tup: TraceTuple, stamps: Optional[bool] = None) -> str:
    """Render a tuple in the grammar accepted by :func:`parse_word`.

    Args:
        tup: Tuple to render
        stamps: Force or suppress ``@`` stamps; by default they are written
            only for tuples with more than one time
    """
    if tup.is_empty:
        return "1"
    show = len(tup.times) > 1 if stamps is None else stamps
    return "; ".join(
        "tr("
        + " ".join(
            letter.text(tup.times[letter.time_id] if show else None) for letter in trace.letters
        )
        + ")"
        for trace in tup.traces
    )
