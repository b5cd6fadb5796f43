"""Exception hierarchy shared by every module.

The CLI maps :class:`PreconditionError` to exit status 2 and
:class:`NumericalError` to exit status 3.
"""


class HermiteSchrodingerError(Exception):
    """Base class for all package errors."""


class PreconditionError(HermiteSchrodingerError, ValueError):
    """An input violates a documented precondition."""


class ConfigError(PreconditionError):
    """An experiment configuration is invalid."""


class SingularityError(PreconditionError):
    """Time too close to a multiple of pi/2 for the Mehler kernel."""


class NumericalError(HermiteSchrodingerError, ArithmeticError):
    """A computation cannot meet its accuracy guarantee."""


class ResolutionError(NumericalError):
    """A grid is too coarse for the oscillation it has to carry."""


class TailLeakError(NumericalError):
    """A function does not decay at the ends of its grid."""


class TruncationError(NumericalError):
    """A truncated infinite range leaves a tail above tolerance."""


class ConvergenceError(NumericalError):
    """An integral cannot be brought within its error budget."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class SearchFailure(NumericalError):
    """An iterative parameter search hit its iteration cap."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
