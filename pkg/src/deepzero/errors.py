"""Exception hierarchy.

Everything raised on purpose derives from :class:`DeepZeroError`.  The CLI
maps :class:`MathError` subclasses to exit code 2 and :class:`UsageError`
subclasses to exit code 1.
"""


class DeepZeroError(Exception):
    pass


class MathError(DeepZeroError):
    """A mathematical precondition of an operation does not hold."""


class UsageError(DeepZeroError):
    """Malformed input: bad documents, flags or parameters."""


class DomainError(MathError, ValueError):
    """Evaluation point outside the natural domain of an expression."""


class OrderOverflowError(MathError, ValueError):
    pass


class PreconditionError(MathError, ValueError):
    pass


class BoundaryZeroError(MathError):
    """The function is (numerically) zero on an integration contour."""


class WindingError(MathError):
    """The argument-principle integral did not settle on an integer."""


class SpecError(UsageError, ValueError):
    """Invalid function-spec document.  ``location`` is a JSON path or line:col."""

    def __init__(self, message, location=""):
        self.location = location
        self.message = message
        super().__init__(f"{location}: {message}" if location else message)
