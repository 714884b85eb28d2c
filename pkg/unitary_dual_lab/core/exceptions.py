"""Custom exceptions for Unitary Dual Lab."""

from typing import Optional


class LabError(Exception):
    """Base exception for all laboratory errors."""

    pass


class MalformedWordError(LabError, ValueError):
    """Raised when a trace-word or trace-tuple is not well formed."""

    pass


class WordSyntaxError(MalformedWordError):
    """Raised when word text does not follow the word grammar."""

    pass


class IndexOutOfRangeError(MalformedWordError):
    """Raised when a letter index lies outside 1..n."""

    pass


class InvalidArgumentError(LabError, ValueError):
    """Raised when a scalar argument is outside its allowed range."""

    pass


class NumericalFailureError(LabError, ArithmeticError):
    """Raised when a propagation misses its tolerance or produces non-finite values."""

    pass


class StateExplosionError(LabError):
    """Raised when a generator closure grows past the state budget."""

    def __init__(self, message: str, seed: Optional[str] = None, states: int = 0):
        """Initialize the error.

        Args:
            message: Human readable message
            seed: Canonical text of the seed that triggered the explosion
            states: Number of states built before giving up
        """
        super().__init__(message)
        self.seed = seed
        self.states = states


class IntegratorFailureError(LabError):
    """Raised when a simulated step drifts away from the unitary group."""

    def __init__(self, message: str, drift: float = 0.0):
        super().__init__(message)
        self.drift = drift


class ConfigurationError(LabError, ValueError):
    """Raised when the configuration cannot be validated."""

    pass
