"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class FourPhotonError(Exception):
    """Base class for every error raised by this package."""


class ModeError(FourPhotonError, ValueError):
    """Invalid, duplicated or undeclared mode label."""


class NumberSectorError(FourPhotonError, ValueError):
    """Attempt to mix Fock states of different total photon number."""


class ZeroStateError(FourPhotonError, ValueError):
    """Operation needs a nonzero state (normalization, phase fixing)."""


class EmptyPostselectionError(FourPhotonError):
    """The coincidence pattern has (numerically) zero probability."""


class DegenerateTensorError(FourPhotonError, ValueError):
    """Correlation tensor is identically zero."""


class CircuitParseError(FourPhotonError):
    """Malformed circuit file.

    ``line`` and ``column`` are 1-based; ``column`` points at the offending token.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)


class CircuitModeError(CircuitParseError, ModeError):
    """Mode validation failure located in a circuit file."""


class UndeclaredModeError(CircuitModeError):
    """Circuit file references a spatial mode missing from its ``modes`` line."""
