"""Exception types shared across the package."""


class MacSparseError(Exception):
    """Base class for all errors raised by this package."""


class GraphValidationError(MacSparseError, ValueError):
    """An edge or problem definition violates a structural invariant."""


class DimensionError(MacSparseError, ValueError):
    """Array or matrix sizes do not match what an operation requires."""


class FeasibilityError(GraphValidationError):
    """No budget-feasible edge selection can produce a connected graph."""


class FiedlerSolverError(MacSparseError, RuntimeError):
    """The eigensolver failed to meet its residual tolerance.

    Carries the best residual achieved so callers can decide whether a
    degraded result is still usable.
    """

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual


class OracleRefusedError(MacSparseError, ValueError):
    """A test oracle declined to run (size cap or ill-conditioned input)."""


class G2oParseError(MacSparseError, ValueError):
    """A g2o file could not be parsed.  Carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class G2oUnsupportedTypeError(G2oParseError):
    """The file contains a structural record type this package rejects."""


class EmptyGraphError(G2oParseError):
    """The file declared no vertices or no edges."""
