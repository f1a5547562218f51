"""Exception hierarchy shared by all modules."""


class ShiftEquivError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(ShiftEquivError, ValueError):
    """Matrix dimensions are incompatible for the requested operation."""


class UnsupportedRingError(ShiftEquivError, TypeError):
    """The operation needs an ordered ring but got the symbolic Laurent ring."""


class InvalidIntervalError(ShiftEquivError, ValueError):
    pass


class InvalidToleranceError(ShiftEquivError, ValueError):
    pass


class InvalidLagError(ShiftEquivError, ValueError):
    pass


class InvalidWitnessError(ShiftEquivError, ValueError):
    pass


class NotAUnitError(ShiftEquivError, ValueError):
    pass


class InvalidOpError(ShiftEquivError, ValueError):
    """An elementary-operation log cannot be replayed."""


class PreconditionError(ShiftEquivError, ValueError):
    """Input violates a documented precondition.

    ``details`` carries machine-readable values (computed norms, traces ...).
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class NeedsShrinkingError(PreconditionError):
    """The norm of a nilpotent input is too large for the clearing recursion."""


class BoundViolationError(ShiftEquivError, AssertionError):
    """A certified degree or norm bound failed; indicates a bug, never user error."""


class NonnegativityRiskError(PreconditionError):
    """An assembly input would not keep the result entrywise nonnegative."""


class FormatError(ShiftEquivError, ValueError):
    """A JSON document does not match the expected layout."""
