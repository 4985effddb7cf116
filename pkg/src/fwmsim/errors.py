"""Exception types shared across the simulator."""


class FWMError(Exception):
    """Base class for all simulator errors."""


class NoSolution(FWMError):
    """A phase-matching solve failed to bracket or converge."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class NonRealSpectrum(FWMError, ArithmeticError):
    pass


class DimensionMismatch(FWMError, ValueError):
    pass


class NonSymplectic(FWMError, ArithmeticError):
    pass


class OutOfRange(FWMError, ValueError):
    pass


class ZeroVector(FWMError, ValueError):
    pass


class IndexOutOfRange(FWMError, IndexError):
    pass


class InvalidPartition(FWMError, ValueError):
    pass


class DimensionGuard(FWMError):
    """Raised when a Fock-space state vector would exceed the size ceiling."""
