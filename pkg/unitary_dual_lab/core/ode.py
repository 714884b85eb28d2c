"""Constant-coefficient linear ODE kernel.

Every moment system in the package has the form ``v' = A v`` with a sparse,
constant generator ``A``. This module assembles such generators and computes
``exp(t A) v0``.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from scipy.integrate import solve_ivp

from ..logging.logger import get_logger
from ..logging.metrics import track_performance
from .exceptions import InvalidArgumentError, NumericalFailureError

logger = get_logger("core.ode")

Number = Union[int, float, complex]
Entry = Tuple[int, int, complex]

DEFAULT_RTOL = 1e-10
DENSE_CROSSOVER = 2000
METHODS = ("auto", "dense", "krylov", "adaptive")


@dataclass(frozen=True)
class SparseSystem:
    """Square generator matrix given as a list of (row, col, coefficient) entries.

    Duplicate (row, col) pairs are summed when the matrix is assembled.
    """

    dimension: int
    entries: Tuple[Entry, ...] = ()
    _cache: Dict[str, scipy.sparse.csr_matrix] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        if self.dimension < 0:
            raise InvalidArgumentError(f"dimension must be non-negative, got {self.dimension}")
        for row, col, value in self.entries:
            if not (0 <= row < self.dimension and 0 <= col < self.dimension):
                raise InvalidArgumentError(
                    f"entry ({row}, {col}) outside a {self.dimension}x{self.dimension} system"
                )
            if not np.isfinite(complex(value)):
                raise NumericalFailureError(f"non-finite generator entry at ({row}, {col})")

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping[int, Number]]) -> "SparseSystem":
        """Build a system from one ``{column: coefficient}`` mapping per row.

        Args:
            rows: Generator rows in state order

        Returns:
            Assembled sparse system
        """
        entries: List[Entry] = []
        for row, coefficients in enumerate(rows):
            for col, value in coefficients.items():
                if value != 0:
                    entries.append((row, col, complex(value)))
        return cls(dimension=len(rows), entries=tuple(entries))

    @classmethod
    def from_dense(cls, matrix: Iterable[Iterable[Number]]) -> "SparseSystem":
        """Build a system from a dense square array."""
        array = np.asarray(matrix, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise InvalidArgumentError(f"expected a square matrix, got shape {array.shape}")
        rows, cols = np.nonzero(array)
        entries = tuple((int(r), int(c), complex(array[r, c])) for r, c in zip(rows, cols))
        return cls(dimension=array.shape[0], entries=entries)

    @property
    def matrix(self) -> scipy.sparse.csr_matrix:
        """Assembled CSR matrix with duplicate entries summed."""
        if "csr" not in self._cache:
            if self.entries:
                rows, cols, values = zip(*self.entries)
            else:
                rows, cols, values = (), (), ()
            coo = scipy.sparse.coo_matrix(
                (np.asarray(values, dtype=complex), (rows, cols)),
                shape=(self.dimension, self.dimension),
            )
            csr = coo.tocsr()
            csr.sum_duplicates()
            self._cache["csr"] = csr
        return self._cache["csr"]

    @property
    def nnz(self) -> int:
        """Number of stored non-zeros after assembly."""
        return int(self.matrix.nnz)

    def to_dense(self) -> np.ndarray:
        """Return the generator as a dense complex array."""
        return self.matrix.toarray()

    def is_real(self) -> bool:
        """Whether every coefficient has zero imaginary part."""
        return bool(np.all(self.matrix.data.imag == 0))


def _check_vector(system: SparseSystem, v: Sequence[Number]) -> np.ndarray:
    vector = np.asarray(v, dtype=complex)
    if vector.shape != (system.dimension,):
        raise InvalidArgumentError(
            f"vector of shape {vector.shape} does not match system dimension {system.dimension}"
        )
    return vector


def _select_method(system: SparseSystem, method: str, crossover: int) -> str:
    if method not in METHODS:
        raise InvalidArgumentError(f"unknown propagation method {method!r}; choose from {METHODS}")
    if method != "auto":
        return method
    return "dense" if system.dimension <= crossover else "adaptive"


@track_performance("propagate")
def propagate(
    system: SparseSystem,
    v0: Sequence[Number],
    t: float,
    rtol: float = DEFAULT_RTOL,
    method: str = "auto",
    crossover: int = DENSE_CROSSOVER,
) -> np.ndarray:
    """Compute ``exp(t A) v0`` for the generator ``A`` of ``system``.

    Args:
        system: Generator of the linear system
        v0: Initial vector
        t: Non-negative propagation time
        rtol: Relative tolerance for the adaptive backend
        method: ``auto``, ``dense`` (scaling and squaring), ``krylov`` or ``adaptive`` (RK45)
        crossover: Largest dimension handled densely when ``method`` is ``auto``

    Returns:
        Propagated vector

    Raises:
        InvalidArgumentError: If ``t`` is negative or ``rtol`` not positive
        NumericalFailureError: If the backend fails or produces non-finite values
    """
    if t < 0:
        raise InvalidArgumentError(f"propagation time must be non-negative, got {t}")
    if rtol <= 0:
        raise InvalidArgumentError(f"rtol must be positive, got {rtol}")

    vector = _check_vector(system, v0)
    if t == 0 or system.dimension == 0:
        return vector.copy()

    chosen = _select_method(system, method, crossover)
    logger.debug(f"Propagating {system.dimension}-state system by t={t} ({chosen})")

    if chosen == "dense":
        result = scipy.linalg.expm(t * system.to_dense()) @ vector
    elif chosen == "krylov":
        result = scipy.sparse.linalg.expm_multiply(t * system.matrix.tocsc(), vector)
    else:
        matrix = system.matrix
        solution = solve_ivp(
            lambda _s, y: matrix @ y,
            (0.0, float(t)),
            vector,
            method="RK45",
            rtol=rtol,
            atol=rtol * 1e-3,
        )
        if not solution.success:
            raise NumericalFailureError(f"adaptive integration failed: {solution.message}")
        result = solution.y[:, -1]

    if not np.all(np.isfinite(result)):
        raise NumericalFailureError(
            f"propagation of a {system.dimension}-state system produced non-finite values"
        )
    return np.asarray(result, dtype=complex)


def stationarity_residual(system: SparseSystem, v: Sequence[Number]) -> float:
    """Euclidean norm of ``A v``; zero exactly at equilibria of the system."""
    vector = _check_vector(system, v)
    if system.dimension == 0:
        return 0.0
    return float(np.linalg.norm(system.matrix @ vector))
