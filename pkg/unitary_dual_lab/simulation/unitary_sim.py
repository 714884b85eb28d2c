"""Monte Carlo simulation of Brownian motion on ``U(nd)``.

``dU = i dH U - U dt / 2`` with ``H`` a Hermitian Brownian motion whose
entries have variance ``t / (nd)``. Paths are advanced by geodesic steps
``U -> exp(i dH) U`` (or Euler steps followed by polar re-unitarization),
the ``d x d`` blocks are extracted at the requested times, and trace-tuples
are averaged over paths.

Every path draws from its own counter-based stream keyed by
``(seed, path index)``; paths are processed in fixed-size chunks on a thread
pool and reduced in path order, so results do not depend on the worker count.
"""

import asyncio
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.exceptions import IntegratorFailureError, InvalidArgumentError, MalformedWordError
from ..logging.logger import PerformanceLogger, get_logger
from ..logging.metrics import get_metrics_collector, track_performance
from ..moments.biane import Regime, partition_of, tuple_moment
from ..moments.free_engine import FreeMomentEngine, default_engine
from ..words.parser import format_tuple
from ..words.trace_words import TraceTuple, canonicalize, normalize_time, validate_indices

logger = get_logger("simulation.unitary_sim")

Scheme = Literal["geodesic", "euler-renorm"]
UNITARITY_TOLERANCE = 1e-8
Reducer = Callable[[np.ndarray], np.ndarray]


class SimConfig(BaseModel):
    """Parameters of one Monte Carlo run."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(1, ge=1, description="Blocks per side")
    d: int = Field(1, ge=1, description="Block size")
    dt: float = Field(0.01, gt=0, description="Step size")
    scheme: Scheme = Field("geodesic", description="Stepping scheme")
    paths: int = Field(10_000, ge=1, description="Number of sample paths")
    seed: int = Field(20240611, ge=0, lt=2**64, description="Master seed")
    workers: int = Field(1, ge=1, description="Worker threads")
    chunk_size: int = Field(32, ge=1, description="Paths advanced together")

    @property
    def dimension(self) -> int:
        return self.n * self.d


@dataclass(frozen=True)
class HermitianIncrement:
    """Increment ``dH`` over a step of length ``dt``; entries have variance ``dt / nd``."""

    matrix: np.ndarray
    dt: float


@dataclass(frozen=True)
class MomentEstimate:
    """Sample mean of a complex moment with its standard error."""

    mean: complex
    stderr: float
    paths: int

    @classmethod
    def from_samples(cls, values: np.ndarray) -> "MomentEstimate":
        """Mean and the Euclidean norm of the componentwise standard errors."""
        values = np.asarray(values, dtype=complex)
        count = values.shape[0]
        mean = complex(values.mean())
        if count < 2:
            return cls(mean=mean, stderr=0.0, paths=count)
        se_re = values.real.std(ddof=1) / math.sqrt(count)
        se_im = values.imag.std(ddof=1) / math.sqrt(count)
        return cls(mean=mean, stderr=float(math.hypot(se_re, se_im)), paths=count)

    def within(self, value: complex, sigmas: float = 3.0, allowance: float = 0.0) -> bool:
        """Whether ``value`` lies within ``sigmas`` standard errors (or ``allowance``)."""
        return abs(self.mean - value) <= max(sigmas * self.stderr, allowance)

    def to_record(self, word: str, config: SimConfig, times: Sequence[str]) -> Dict[str, Any]:
        """JSON record of the estimate."""
        return {
            "word": word,
            "n": config.n,
            "d": config.d,
            "times": [float(t) for t in times],
            "mean_re": self.mean.real,
            "mean_im": self.mean.imag,
            "stderr": self.stderr,
            "paths": self.paths,
            "seed": config.seed,
            "dt": config.dt,
            "scheme": config.scheme,
        }


def path_rng(seed: int, path_index: int) -> np.random.Generator:
    """Counter-based stream of one path."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(path_index,)))
    )


def _hermitian(gaussians: np.ndarray, dt: float, nd: int) -> np.ndarray:
    g = gaussians[..., 0, :, :] + 1j * gaussians[..., 1, :, :]
    return (g + np.swapaxes(g.conj(), -1, -2)) * (0.5 * math.sqrt(dt / nd))


def sample_increment(nd: int, dt: float, rng: np.random.Generator) -> HermitianIncrement:
    """Draw ``dH``: real diagonal of variance ``dt/nd``, complex off-diagonal of variance ``dt/nd``.

    Raises:
        InvalidArgumentError: If ``dt`` is not positive
    """
    if dt <= 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    return HermitianIncrement(_hermitian(rng.standard_normal((2, nd, nd)), dt, nd), dt)


def unitarity_drift(u: np.ndarray) -> float:
    """Largest ``||U^dagger U - I||_F`` over a (batch of) matrices."""
    gram = np.swapaxes(u.conj(), -1, -2) @ u
    eye = np.eye(u.shape[-1])
    return float(np.max(np.linalg.norm(gram - eye, axis=(-2, -1))))


def _advance(u: np.ndarray, h: np.ndarray, dt: float, scheme: str) -> np.ndarray:
    if scheme == "geodesic":
        w, v = np.linalg.eigh(h)
        phase = v * np.exp(1j * w)[..., None, :]
        return phase @ np.swapaxes(v.conj(), -1, -2) @ u
    if scheme == "euler-renorm":
        eye = np.eye(u.shape[-1])
        m = (eye * (1 - 0.5 * dt) + 1j * h) @ u
        left, _, right = np.linalg.svd(m)
        return left @ right
    raise InvalidArgumentError(f"unknown scheme {scheme!r}")


def step(u: np.ndarray, inc: HermitianIncrement, scheme: Scheme = "geodesic") -> np.ndarray:
    """Advance ``u`` by one increment.

    Raises:
        IntegratorFailureError: If the result is further than ``1e-8`` from unitary
    """
    result = _advance(u, inc.matrix, inc.dt, scheme)
    drift = unitarity_drift(result)
    if drift > UNITARITY_TOLERANCE:
        raise IntegratorFailureError(f"unitarity drift {drift:.3e} after a {scheme} step", drift)
    return result


def _time_grid(times: Sequence[float], dt: float) -> List[Tuple[int, float]]:
    """Substeps ``(count, size)`` from each requested time to the next, starting at 0."""
    grid = []
    previous = 0.0
    for t in times:
        gap = t - previous
        count = math.ceil(gap / dt - 1e-9) if gap > 0 else 0
        grid.append((count, gap / count if count else 0.0))
        previous = t
    return grid


def _check_times(times: Sequence[float]) -> List[float]:
    values = [float(t) for t in times]
    if not values:
        raise InvalidArgumentError("at least one time is required")
    if any(t < 0 for t in values) or any(b < a for a, b in zip(values, values[1:])):
        raise InvalidArgumentError(f"times must be sorted and non-negative, got {values}")
    return values


def _run_chunk(
    config: SimConfig, times: Sequence[float], start: int, stop: int, reducer: Reducer
) -> np.ndarray:
    nd = config.dimension
    rngs = [path_rng(config.seed, index) for index in range(start, stop)]
    u = np.broadcast_to(np.eye(nd, dtype=complex), (stop - start, nd, nd)).copy()
    snapshots = np.empty((stop - start, len(times), nd, nd), dtype=complex)
    for slot, (count, size) in enumerate(_time_grid(times, config.dt)):
        for _ in range(count):
            gaussians = np.stack([rng.standard_normal((2, nd, nd)) for rng in rngs])
            u = _advance(u, _hermitian(gaussians, size, nd), size, config.scheme)
        drift = unitarity_drift(u)
        if drift > UNITARITY_TOLERANCE:
            raise IntegratorFailureError(
                f"unitarity drift {drift:.3e} at t={times[slot]} (paths {start}..{stop - 1})", drift
            )
        snapshots[:, slot] = u
    return reducer(snapshots)


async def _gather_chunks(
    config: SimConfig, times: Sequence[float], reducer: Reducer
) -> List[np.ndarray]:
    loop = asyncio.get_running_loop()
    bounds = [
        (start, min(start + config.chunk_size, config.paths))
        for start in range(0, config.paths, config.chunk_size)
    ]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        tasks = [
            loop.run_in_executor(pool, _run_chunk, config, times, start, stop, reducer)
            for start, stop in bounds
        ]
        return await asyncio.gather(*tasks)


def _run(config: SimConfig, times: Sequence[float], reducer: Reducer) -> np.ndarray:
    values = _check_times(times)
    with PerformanceLogger(
        logger, "simulate", {"paths": config.paths, "nd": config.dimension, "times": values}
    ):
        chunks = asyncio.run(_gather_chunks(config, values, reducer))
    get_metrics_collector().increment("simulation.paths", config.paths)
    return np.concatenate(chunks)


def simulate_paths(config: SimConfig, times: Sequence[float]) -> np.ndarray:
    """Unitaries of every path at every requested time, shape ``(paths, len(times), nd, nd)``."""
    return _run(config, times, lambda snapshots: snapshots)


def block(u: np.ndarray, i: int, j: int, d: int, eps: int = 0) -> np.ndarray:
    """Block ``(i, j)`` (1-based) of a batch of matrices, adjointed when ``eps = 1``."""
    b = u[..., (i - 1) * d : i * d, (j - 1) * d : j * d]
    return np.swapaxes(b.conj(), -1, -2) if eps else b


def tuple_values(tup: TraceTuple, snapshots: np.ndarray, slots: Sequence[int], d: int) -> np.ndarray:
    """Per-path value of a tuple: product over traces of ``(1/d) Tr`` of the block product.

    Args:
        tup: Trace-tuple
        snapshots: Array of shape ``(paths, times, nd, nd)``
        slots: Snapshot index of each time slot of ``tup``
        d: Block size
    """
    paths = snapshots.shape[0]
    values = np.ones(paths, dtype=complex)
    for trace in tup.traces:
        product = np.broadcast_to(np.eye(d, dtype=complex), (paths, d, d))
        for letter in trace.letters:
            product = product @ block(snapshots[:, slots[letter.time_id]], letter.i, letter.j, d, letter.eps)
        values = values * np.trace(product, axis1=-2, axis2=-1) / d
    return values


def _union_times(tuples: Sequence[TraceTuple]) -> Tuple[List[str], List[List[int]]]:
    times = sorted({t for tup in tuples for t in tup.times}, key=Decimal)
    slot = {t: idx for idx, t in enumerate(times)}
    return times, [[slot[t] for t in tup.times] for tup in tuples]


@track_performance("simulation.estimate_moments")
def estimate_moments(tuples: Sequence[TraceTuple], config: SimConfig) -> List[MomentEstimate]:
    """Estimate several tuples on the same sample paths."""
    tuples = [validate_indices(canonicalize(tup), config.n) for tup in tuples]
    times, slots = _union_times(tuples)

    def reducer(snapshots: np.ndarray) -> np.ndarray:
        return np.stack([tuple_values(tup, snapshots, s, config.d) for tup, s in zip(tuples, slots)], axis=1)

    samples = _run(config, [float(t) for t in times], reducer)
    return [MomentEstimate.from_samples(samples[:, k]) for k in range(len(tuples))]


def estimate_moment(tup: TraceTuple, config: SimConfig) -> MomentEstimate:
    """Estimate one tuple at its own time table."""
    return estimate_moments([tup], config)[0]


def estimate_combination(
    terms: Sequence[Tuple[Union[Fraction, complex, float], TraceTuple]], config: SimConfig
) -> MomentEstimate:
    """Estimate ``sum_k c_k phi(tuple_k)`` path by path."""
    coefficients = np.array([complex(c) for c, _ in terms])
    tuples = [validate_indices(canonicalize(tup), config.n) for _, tup in terms]
    times, slots = _union_times(tuples)

    def reducer(snapshots: np.ndarray) -> np.ndarray:
        columns = [tuple_values(tup, snapshots, s, config.d) for tup, s in zip(tuples, slots)]
        return np.stack(columns, axis=1) @ coefficients

    samples = _run(config, [float(t) for t in times], reducer)
    return MomentEstimate.from_samples(samples)


@dataclass
class ScanRow:
    """One block size of a convergence scan."""

    d: int
    mc_mean: complex
    stderr: float
    free_value: complex
    bias: float
    exact_value: Optional[complex] = None

    @property
    def exact_bias(self) -> Optional[float]:
        if self.exact_value is None:
            return None
        return abs(self.exact_value - self.free_value)


@dataclass
class ScanResult:
    """Monte Carlo biases against the free value over several block sizes."""

    word: str
    n: int
    times: List[float]
    rows: List[ScanRow]
    slope: Optional[float] = None
    exact_slope: Optional[float] = None


def _fit_slope(points: Sequence[Tuple[int, float]]) -> Optional[float]:
    points = [(d, b) for d, b in points if b > 0]
    if len(points) < 2:
        return None
    ds, biases = zip(*points)
    return float(np.polyfit(np.log(ds), np.log(biases), 1)[0])


def _exact_finite_value(tup: TraceTuple, n: int, d: int) -> Optional[complex]:
    if n != 1 or len(tup.times) != 1:
        return None
    try:
        partition_of(tup)
    except MalformedWordError:
        return None
    return tuple_moment(tup, float(tup.times[0]), Regime.finite(d))


@track_performance("simulation.convergence_scan")
def convergence_scan(
    tup: TraceTuple,
    t: Optional[float],
    n: int,
    d_list: Sequence[int],
    paths: int,
    seed: int = 20240611,
    dt: float = 0.01,
    scheme: Scheme = "geodesic",
    workers: int = 1,
    chunk_size: int = 32,
    engine: Optional[FreeMomentEngine] = None,
) -> ScanResult:
    """Compare Monte Carlo estimates at each ``d`` with the free value.

    The slope of ``log(bias)`` against ``log(d)`` is fitted over the rows
    whose bias exceeds three standard errors. For single-time ``n = 1`` words
    the exact finite-``d`` value from the partition system is reported too,
    with its own slope.

    Args:
        tup: Trace-tuple; a single-time tuple is moved to time ``t``
        t: Evaluation time, or ``None`` to keep the tuple's own times
        n: Block count
        d_list: Block sizes to simulate
        paths: Paths per block size
        seed: Master seed shared by every block size
        dt: Step size
        scheme: Stepping scheme
        workers: Worker threads
        chunk_size: Paths advanced together
        engine: Free engine (the shared default if omitted)
    """
    tup = validate_indices(canonicalize(tup), n)
    if t is not None:
        if len(tup.times) != 1:
            raise InvalidArgumentError("an explicit time only applies to single-time words")
        tup = tup.with_times([normalize_time(t)])
    engine = engine or default_engine()
    free_value = engine.evaluate(tup, n)

    rows = []
    for d in d_list:
        config = SimConfig(
            n=n, d=d, dt=dt, scheme=scheme, paths=paths, seed=seed, workers=workers, chunk_size=chunk_size
        )
        estimate = estimate_moment(tup, config)
        rows.append(
            ScanRow(
                d=d,
                mc_mean=estimate.mean,
                stderr=estimate.stderr,
                free_value=free_value,
                bias=abs(estimate.mean - free_value),
                exact_value=_exact_finite_value(tup, n, d),
            )
        )
        logger.info(f"Scan {format_tuple(tup)} d={d}: bias {rows[-1].bias:.3e} +- {estimate.stderr:.1e}")

    slope = _fit_slope([(r.d, r.bias) for r in rows if r.bias > 3 * r.stderr])
    exact_points = [(r.d, r.exact_bias) for r in rows if r.exact_bias is not None]
    return ScanResult(
        word=format_tuple(tup),
        n=n,
        times=tup.time_values,
        rows=rows,
        slope=slope,
        exact_slope=_fit_slope(exact_points),  # type: ignore[arg-type]
    )
