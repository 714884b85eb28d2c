"""Gaussian Schurmann triple of the Levy process on ``U<n>``.

The pre-Hilbert space is ``D = M_n(C)`` with ``<A, B> = Tr(A^dagger B)``.
On generators::

    eta(u_jk)  =  E_jk / sqrt(n)
    eta(u_jk*) = -E_kj / sqrt(n)
    L(u_jk) = L(u_jk*) = -delta_jk / 2
    pi(a) = delta(a) Id

and on longer words ``eta`` follows the cocycle rule and ``L`` the coboundary
rule ``L(ab) = delta(a) L(b) + L(a) delta(b) + <eta(a*), eta(b)>``.

Every ``eta`` value is ``sqrt(n)^-1`` times a rational matrix, so vectors are
stored as rational "units" and every inner product and ``L`` value is an
exact fraction.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from ..core.exceptions import InvalidArgumentError, MalformedWordError
from ..logging.logger import get_logger
from ..logging.metrics import track_performance
from ..moments.free_engine import derivative_at_zero
from ..words.trace_words import Letter, TraceTuple, validate_indices

logger = get_logger("schurmann.triple")

Word = Tuple[Letter, ...]
WordLike = Union[TraceTuple, Sequence[Letter]]
Combination = Dict[Word, Fraction]

UNIT: Word = ()


def _as_word(word: WordLike) -> Word:
    """Letters of a word, all moved onto time slot 0."""
    if isinstance(word, TraceTuple):
        if len(word.traces) != 1:
            raise MalformedWordError("Schurmann functionals take a single-trace word")
        letters: Iterable[Letter] = word.traces[0].letters
    else:
        letters = word
    return tuple(letter.restamp(0) for letter in letters)


def _check_n(word: Word, n: int) -> None:
    if n < 1:
        raise InvalidArgumentError(f"block count n must be at least 1, got {n}")
    if any(max(letter.i, letter.j) > n for letter in word):
        validate_indices(TraceTuple.single(word), n)


def word_adjoint(word: Word) -> Word:
    return tuple(letter.star() for letter in reversed(word))


def delta(word: Word) -> int:
    """Counit of a word."""
    return int(all(letter.i == letter.j for letter in word))


@dataclass(frozen=True)
class SchurmannVector:
    """Element ``units / sqrt(n)`` of ``D = M_n(C)`` with rational ``units``."""

    units: Tuple[Tuple[Fraction, ...], ...]
    n: int

    @classmethod
    def zero(cls, n: int) -> "SchurmannVector":
        return cls(tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n)), n)

    @classmethod
    def elementary(cls, row: int, col: int, n: int, sign: int = 1) -> "SchurmannVector":
        """``sign * E_{row,col} / sqrt(n)`` with 1-based indices."""
        return cls(
            tuple(
                tuple(Fraction(sign if (r, c) == (row, col) else 0) for c in range(1, n + 1))
                for r in range(1, n + 1)
            ),
            n,
        )

    def __add__(self, other: "SchurmannVector") -> "SchurmannVector":
        return SchurmannVector(
            tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.units, other.units)),
            self.n,
        )

    def scale(self, factor: Union[int, Fraction]) -> "SchurmannVector":
        return SchurmannVector(tuple(tuple(factor * a for a in row) for row in self.units), self.n)

    @property
    def mat(self) -> np.ndarray:
        """The matrix as a complex array."""
        return np.array([[float(a) for a in row] for row in self.units], dtype=complex) / math.sqrt(
            self.n
        )

    def inner(self, other: "SchurmannVector") -> Fraction:
        """``Tr(self^dagger other)``, exact."""
        total = sum(
            (a * b for ra, rb in zip(self.units, other.units) for a, b in zip(ra, rb)),
            start=Fraction(0),
        )
        return total / self.n

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.units for a in row)


def eta(word: WordLike, n: int) -> SchurmannVector:
    """Cocycle value of a word.

    Sum over positions ``p`` of the generator value at ``p`` times the
    counit of every other letter.
    """
    letters = _as_word(word)
    _check_n(letters, n)
    result = SchurmannVector.zero(n)
    for p, letter in enumerate(letters):
        if not all(other.i == other.j for q, other in enumerate(letters) if q != p):
            continue
        if letter.eps == 0:
            result = result + SchurmannVector.elementary(letter.i, letter.j, n)
        else:
            result = result + SchurmannVector.elementary(letter.j, letter.i, n, sign=-1)
    return result


@lru_cache(maxsize=None)
def _ell(word: Word, n: int) -> Fraction:
    if not word:
        return Fraction(0)
    if len(word) == 1:
        return Fraction(-delta(word), 2)
    first, rest = word[:1], word[1:]
    return (
        delta(first) * _ell(rest, n)
        + _ell(first, n) * delta(rest)
        + eta(word_adjoint(first), n).inner(eta(rest, n))
    )


def ell(word: WordLike, n: int) -> Fraction:
    """Generator value ``L(word)``; ``L`` of the unit is 0."""
    letters = _as_word(word)
    _check_n(letters, n)
    return _ell(letters, n)


def pi(word: WordLike, n: int) -> np.ndarray:
    """Representation of a word on ``D``: ``delta(word)`` times the identity on ``M_n``."""
    letters = _as_word(word)
    return delta(letters) * np.eye(n * n)


def multiply(*factors: Combination) -> Combination:
    """Product of formal combinations of words (concatenation, bilinear)."""
    result: Combination = {UNIT: Fraction(1)}
    for factor in factors:
        product: Combination = {}
        for w1, c1 in result.items():
            for w2, c2 in factor.items():
                product[w1 + w2] = product.get(w1 + w2, Fraction(0)) + c1 * c2
        result = {w: c for w, c in product.items() if c != 0}
    return result


def ell_combination(combination: Combination, n: int) -> Fraction:
    return sum((c * ell(w, n) for w, c in combination.items()), start=Fraction(0))


def eta_combination(combination: Combination, n: int) -> SchurmannVector:
    result = SchurmannVector.zero(n)
    for w, c in combination.items():
        result = result + eta(w, n).scale(c)
    return result


def generator_letters(n: int) -> List[Letter]:
    """All ``2 n^2`` letters ``u_ij`` and ``u_ij*``."""
    return [
        Letter(0, i, j, eps) for eps in (0, 1) for i in range(1, n + 1) for j in range(1, n + 1)
    ]


def kernel_generators(n: int) -> List[Tuple[str, Combination]]:
    """Generators ``u_ij - delta_ij 1`` and ``u_ij* - delta_ij 1`` of the counit kernel."""
    result = []
    for letter in generator_letters(n):
        combination: Combination = {(letter,): Fraction(1)}
        label = letter.text()
        if letter.i == letter.j:
            combination[UNIT] = Fraction(-1)
            label = f"({label} - 1)"
        result.append((label, combination))
    return result


class Violation(BaseModel):
    """One failed identity."""

    factors: List[str]
    value: str


class GaussianityReport(BaseModel):
    """Outcome of the gaussianity checks at one block count."""

    n: int
    max_len: int
    triples_checked: int = 0
    violations: List[Violation] = Field(default_factory=list)
    cocycle_pairs_checked: int = 0
    cocycle_violations: List[Violation] = Field(default_factory=list)
    pi_trivial_on_kernel: bool = True

    @property
    def passed(self) -> bool:
        return not self.violations and not self.cocycle_violations and self.pi_trivial_on_kernel


@track_performance("schurmann.gaussianity_check")
def gaussianity_check(n: int, max_len: int = 3) -> GaussianityReport:
    """Check that ``L`` vanishes on every product of 3 to ``max_len`` kernel generators.

    Also checks ``eta(ab) = delta(a) eta(b) + eta(a) delta(b)`` on every pair
    of generator letters and that ``pi`` vanishes on the kernel generators.

    Raises:
        InvalidArgumentError: If ``max_len < 3`` or ``n < 1``
    """
    if max_len < 3:
        raise InvalidArgumentError(f"max_len must be at least 3, got {max_len}")
    if n < 1:
        raise InvalidArgumentError(f"block count n must be at least 1, got {n}")

    report = GaussianityReport(n=n, max_len=max_len)
    generators = kernel_generators(n)
    for length in range(3, max_len + 1):
        for chosen in itertools.product(generators, repeat=length):
            value = ell_combination(multiply(*(c for _, c in chosen)), n)
            report.triples_checked += 1
            if value != 0:
                report.violations.append(
                    Violation(factors=[label for label, _ in chosen], value=str(value))
                )

    letters = generator_letters(n)
    for a, b in itertools.product(letters, repeat=2):
        lhs = eta((a, b), n)
        rhs = eta((b,), n).scale(delta((a,))) + eta((a,), n).scale(delta((b,)))
        report.cocycle_pairs_checked += 1
        if lhs != rhs:
            report.cocycle_violations.append(
                Violation(factors=[a.text(), b.text()], value="eta(ab) mismatch")
            )

    for label, combination in generators:
        representation = sum(float(c) * pi(w, n) for w, c in combination.items())
        if np.any(representation != 0):
            report.pi_trivial_on_kernel = False
            logger.warning(f"pi does not vanish on kernel generator {label}")

    logger.info(
        f"Gaussianity check n={n} max_len={max_len}: {report.triples_checked} products, "
        f"{len(report.violations)} violations"
    )
    return report


@dataclass(frozen=True)
class WordFunctionalValue:
    """``eta``, ``L`` and counit of one word."""

    word: Word
    eta: SchurmannVector
    ell: Fraction
    counit: int


def word_functionals(word: WordLike, n: int) -> WordFunctionalValue:
    letters = _as_word(word)
    return WordFunctionalValue(word=letters, eta=eta(letters, n), ell=ell(letters, n), counit=delta(letters))


@dataclass(frozen=True)
class CrosscheckResult:
    """``L(word)`` against the derivative at zero of the moment of ``tr(word)``."""

    word: str
    n: int
    ell_value: Fraction
    ode_value: Fraction

    @property
    def difference(self) -> Fraction:
        return self.ell_value - self.ode_value

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction]:
        return self.ell_value, self.ode_value, self.difference


def generator_crosscheck(word: WordLike, n: int) -> CrosscheckResult:
    """Compare ``L(word)`` with ``d/dt phi_t(tr(word))`` at ``t = 0``."""
    letters = _as_word(word)
    tup = TraceTuple.single(letters)
    return CrosscheckResult(
        word=str(tup), n=n, ell_value=ell(letters, n), ode_value=derivative_at_zero(tup, n)
    )


def all_words(n: int, max_len: int) -> Iterable[Word]:
    letters = generator_letters(n)
    for length in range(1, max_len + 1):
        yield from itertools.product(letters, repeat=length)


@track_performance("schurmann.crosscheck_sweep")
def crosscheck_sweep(n: int, max_len: int = 3) -> List[CrosscheckResult]:
    """:func:`generator_crosscheck` over every word of length 1 to ``max_len``."""
    if max_len < 1:
        raise InvalidArgumentError(f"max_len must be at least 1, got {max_len}")
    return [generator_crosscheck(word, n) for word in all_words(n, max_len)]


def base_values(n: int) -> List[Tuple[Letter, Fraction]]:
    """``L`` on every generator letter."""
    return [(letter, ell((letter,), n)) for letter in generator_letters(n)]


def max_difference(results: Sequence[CrosscheckResult]) -> Optional[Fraction]:
    return max((abs(r.difference) for r in results), default=None)
