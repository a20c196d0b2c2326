"""Exception and warning types shared across the package."""


class CoxKitError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CoxKitError, ValueError):
    """An argument violates a documented precondition (shape, range, NaN, ...)."""


class NumericalDomainError(CoxKitError, ArithmeticError):
    """A log-space kernel was asked for the log of a nonpositive number.

    This never happens for inputs that satisfy the documented invariants;
    seeing it means an upstream precondition was violated.
    """


class ConcordanceUndefinedError(CoxKitError, ZeroDivisionError):
    """No eligible pair exists, so the concordance index has a zero denominator."""


class DegenerateObjectiveError(CoxKitError):
    """The partial likelihood carries no information (no uncensored events)."""


class ParseError(CoxKitError, ValueError):
    """A CSV cell could not be parsed; carries the offending file line."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class EmptyDatasetError(CoxKitError):
    """No usable rows remain after ingestion."""


# I/O failures are reported through the standard OSError hierarchy.
IoError = OSError


class ConvergenceWarning(UserWarning):
    """An iterative fit stopped at max_iters without meeting its certificate."""


class DataWarning(UserWarning):
    """Non-fatal data issue (dropped rows, all-censored input, ...)."""
