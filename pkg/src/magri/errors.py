"""Exception types shared across the package."""


class MagriError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(MagriError):
    """Operator and vector sizes are incompatible."""


class NotSkewAdjoint(MagriError):
    """An operation required a skew-adjoint operator and got something else."""


class NotClosed(MagriError):
    """A vector was required to be a variational gradient and is not."""


class NoSolution(MagriError):
    """A linear problem (integration, recursion step) has no solution."""


class EmptyAnsatz(MagriError):
    """A candidate monomial space came out empty."""


class ExprSyntaxError(MagriError):
    """Rejected input text, with 1-based line/column position."""

    def __init__(self, message, line=1, col=1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


class ExponentError(ExprSyntaxError):
    """Negative exponent on a generator that is not the zeroth v jet."""
