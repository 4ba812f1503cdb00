"""Exception hierarchy shared by every module of the package."""


class QPMapError(ValueError):
    """Base class for all domain errors raised by :mod:`qpmaps`."""


class DimensionMismatch(QPMapError):
    pass


class ZeroColumnInA(QPMapError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} of A is all zero")


class ZeroRowInB(QPMapError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"row {row} of B is all zero")


class DuplicateBRows(QPMapError):
    def __init__(self, first, second):
        self.pair = (first, second)
        super().__init__(f"rows {first} and {second} of B are identical")


class OverflowGuard(QPMapError, ArithmeticError):
    """A quasimonomial exponent left the range where ``exp`` is representable."""

    def __init__(self, message, t=None):
        self.t = t
        if t is not None:
            message = f"{message} (at step t={t})"
        super().__init__(message)


class NonFiniteState(QPMapError, ArithmeticError):
    def __init__(self, message, t=None):
        self.t = t
        if t is not None:
            message = f"{message} (at step t={t})"
        super().__init__(message)


class InvalidParameter(QPMapError):
    pass


class SingularC(QPMapError):
    pass


class WrongDimension(QPMapError):
    pass


class OddDimension(WrongDimension):
    pass


class IndexOutOfRange(QPMapError, IndexError):
    pass


class ConditionTwoViolated(QPMapError):
    pass


class NotConservative2D(QPMapError):
    pass


class ConditionsNotMet(QPMapError):
    def __init__(self, failed):
        self.failed = tuple(failed)
        super().__init__("necessary conditions not met: " + ", ".join(self.failed))
