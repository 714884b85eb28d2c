"""Tests for the linear ODE kernel."""

import math

import numpy as np
import pytest

from unitary_dual_lab.core.exceptions import InvalidArgumentError, NumericalFailureError
from unitary_dual_lab.core.ode import SparseSystem, propagate, stationarity_residual
from unitary_dual_lab.logging.metrics import get_metrics_collector


@pytest.fixture
def rotation():
    """Generator of a plane rotation with decay."""
    return SparseSystem.from_rows([{0: -0.5, 1: -1.0}, {0: 1.0, 1: -0.5}])


@pytest.fixture
def random_stable():
    """Factory of seeded dense generators shifted to a decaying spectrum."""

    def build(dim: int) -> SparseSystem:
        rng = np.random.default_rng(dim)
        matrix = rng.standard_normal((dim, dim)) / math.sqrt(dim) - 1.5 * np.eye(dim)
        return SparseSystem.from_dense(matrix)

    return build


def relative_error(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


class TestSparseSystem:
    """Test generator assembly."""

    def test_duplicates_are_summed(self):
        system = SparseSystem(2, ((0, 0, 1.0), (0, 0, 2.0), (1, 0, -1.0)))
        dense = system.to_dense()
        assert dense[0, 0] == 3.0
        assert dense[1, 0] == -1.0
        assert system.nnz == 2

    def test_from_dense(self):
        system = SparseSystem.from_dense([[0, 1], [2, 0]])
        assert system.dimension == 2
        assert np.array_equal(system.to_dense().real, [[0, 1], [2, 0]])
        assert system.is_real()

    def test_out_of_range_entry(self):
        with pytest.raises(InvalidArgumentError):
            SparseSystem(2, ((0, 2, 1.0),))

    def test_non_finite_entry(self):
        with pytest.raises(NumericalFailureError):
            SparseSystem(1, ((0, 0, float("nan")),))


class TestPropagate:
    """Test exp(tA) v0."""

    def test_scalar_decay(self):
        system = SparseSystem.from_rows([{0: -1.0}])
        assert propagate(system, [1.0], 1.0)[0] == pytest.approx(math.exp(-1), abs=1e-12)

    @pytest.mark.parametrize("method", ["dense", "krylov", "adaptive"])
    def test_methods_agree(self, rotation, method):
        t = 1.3
        expected = math.exp(-0.5 * t) * np.array([math.cos(t), math.sin(t)])
        result = propagate(rotation, [1.0, 0.0], t, method=method)
        assert np.allclose(result, expected, atol=1e-8)

    @pytest.mark.parametrize("method", ["dense", "krylov", "adaptive"])
    def test_semigroup(self, random_stable, method):
        system = random_stable(60)
        v0 = np.random.default_rng(1).standard_normal(60)
        halfway = propagate(system, v0, 0.4, method=method)
        composed = propagate(system, halfway, 0.7, method=method)
        direct = propagate(system, v0, 1.1, method=method)
        assert relative_error(composed, direct) < 1e-8

    @pytest.mark.parametrize("dim", [60, 200])
    def test_backends_agree_on_random_systems(self, random_stable, dim):
        system = random_stable(dim)
        v0 = np.random.default_rng(2).standard_normal(dim) + 0.5j
        dense = propagate(system, v0, 1.0, method="dense")
        assert relative_error(propagate(system, v0, 1.0, method="krylov"), dense) < 1e-10
        assert relative_error(propagate(system, v0, 1.0, method="adaptive"), dense) < 1e-7
        assert relative_error(propagate(system, v0, 1.0, crossover=dim - 1), dense) < 1e-7

    def test_auto_uses_adaptive_above_crossover(self, rotation):
        result = propagate(rotation, [1.0, 0.0], 1.0, crossover=1)
        dense = propagate(rotation, [1.0, 0.0], 1.0, method="dense")
        assert np.allclose(result, dense, atol=1e-8)

    def test_zero_time_returns_copy(self, rotation):
        v0 = np.array([1.0, 2.0], dtype=complex)
        result = propagate(rotation, v0, 0.0)
        assert np.array_equal(result, v0)
        result[0] = 5
        assert v0[0] == 1.0

    def test_complex_initial_vector(self):
        system = SparseSystem.from_rows([{0: -2.0}])
        result = propagate(system, [1j], 0.5)
        assert result[0] == pytest.approx(1j * math.exp(-1), abs=1e-12)

    def test_empty_system(self):
        assert propagate(SparseSystem(0), [], 1.0).shape == (0,)

    def test_invalid_arguments(self, rotation):
        with pytest.raises(InvalidArgumentError):
            propagate(rotation, [1.0, 0.0], -1.0)
        with pytest.raises(InvalidArgumentError):
            propagate(rotation, [1.0], 1.0)
        with pytest.raises(InvalidArgumentError):
            propagate(rotation, [1.0, 0.0], 1.0, method="euler")
        with pytest.raises(InvalidArgumentError):
            propagate(rotation, [1.0, 0.0], 1.0, rtol=0)

    def test_overflow_is_reported(self):
        system = SparseSystem.from_rows([{0: 1000.0}])
        with pytest.raises(NumericalFailureError):
            propagate(system, [1.0], 10.0, method="dense")

    def test_timing_is_recorded(self, rotation):
        propagate(rotation, [1.0, 0.0], 0.5)
        assert get_metrics_collector().get_timing("propagate").count >= 1


class TestStationarity:
    """Test stationarity_residual."""

    def test_equilibrium(self):
        system = SparseSystem.from_rows([{0: -1.0, 1: 1.0}, {0: 1.0, 1: -1.0}])
        assert stationarity_residual(system, [1.0, 1.0]) == 0.0
        assert stationarity_residual(system, [1.0, 0.0]) == pytest.approx(math.sqrt(2))
