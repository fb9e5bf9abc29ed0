"""Exception types shared across the package."""


class PLTwistError(Exception):
    pass


class PLMapError(PLTwistError, ValueError):
    """Invalid piecewise-linear map data."""


class DiscontinuousGlue(PLMapError):
    """Glue pieces disagree at a shared endpoint."""


class UnknownGenerator(PLTwistError, KeyError):
    pass


class DuplicateName(PLTwistError, ValueError):
    pass


class UnsortedInput(PLTwistError, ValueError):
    pass


class FixedBasePoint(PLTwistError, ValueError):
    """unique_power called with a base point fixed by the map."""


class NonConvergent(PLTwistError, RuntimeError):
    """Stair iteration exceeded its stabilization bound."""


class PreconditionViolated(PLTwistError, ValueError):
    pass


class NotInEPtilde2(PLTwistError, ValueError):
    pass


class TailMismatchError(PLTwistError, ValueError):
    """Inputs whose tail translations are incompatible."""


class DegenerateExponentEquation(PLTwistError, RuntimeError):
    """The exponent-equation fallback window was exhausted without a
    conclusive family; surfaced instead of guessing."""


class ParseError(PLTwistError, ValueError):
    """Malformed element document or word."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
