"""Exception hierarchy.

Each class carries a ``code`` matching the error names used in reports and
CLI diagnostics.
"""


class CasimirPolderError(Exception):
    code = "ERROR"


class NegativeFrequencyError(CasimirPolderError, ValueError):
    code = "NEGATIVE_FREQUENCY"


class TableRangeUnderflowError(CasimirPolderError, ValueError):
    code = "TABLE_RANGE_UNDERFLOW"


class MaterialParseError(CasimirPolderError, ValueError):
    code = "PARSE_ERROR"


class SchemaViolationError(CasimirPolderError, ValueError):
    code = "SCHEMA_VIOLATION"


class InvariantViolationError(CasimirPolderError, ValueError):
    """A model evaluates to something unphysical on the probe grid.

    ``invariant`` is ``"MINIMUM"`` (value below the floor) or
    ``"MONOTONICITY"`` (value increases with frequency).
    """

    code = "INVARIANT_VIOLATION"

    def __init__(self, message, invariant, xi=None, values=None):
        super().__init__(message)
        self.invariant = invariant
        self.xi = xi
        self.values = values


class NonpositiveTemperatureError(CasimirPolderError, ValueError):
    code = "NONPOSITIVE_TEMPERATURE"


class NonpositiveSeparationError(CasimirPolderError, ValueError):
    code = "NONPOSITIVE_SEPARATION"


class DegeneratePointError(CasimirPolderError, ValueError):
    code = "DEGENERATE_POINT"


class QuadratureNotConvergedError(CasimirPolderError, ArithmeticError):
    code = "QUADRATURE_NOT_CONVERGED"

    def __init__(self, message, error_estimate=None, panels=None):
        super().__init__(message)
        self.error_estimate = error_estimate
        self.panels = panels


class SumNotConvergedError(CasimirPolderError, ArithmeticError):
    code = "SUM_NOT_CONVERGED"

    def __init__(self, message, n_reached=None, last_term=None):
        super().__init__(message)
        self.n_reached = n_reached
        self.last_term = last_term


class SweepError(CasimirPolderError):
    """Raised when any sample of a sweep fails; ``curve`` holds the partial result."""

    code = "SWEEP_FAILED"

    def __init__(self, message, curve=None, failures=None):
        super().__init__(message)
        self.curve = curve
        self.failures = failures or []
