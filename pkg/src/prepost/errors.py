"""Exception hierarchy shared by every module."""


class PrePostError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVector(PrePostError, ValueError):
    pass


class DuplicateLabel(PrePostError, ValueError):
    pass


class DimensionMismatch(PrePostError, ValueError):
    pass


class NotHermitian(PrePostError, ValueError):
    pass


class NotOrthonormal(PrePostError, ValueError):
    pass


class ConvergenceError(PrePostError, RuntimeError):
    pass


class TimeOutOfRange(PrePostError, ValueError):
    pass


class ZeroProbabilityOutcome(PrePostError, ValueError):
    pass


class IncompatibleSelection(PrePostError, ValueError):
    """The post-selected state cannot be reached through any outcome."""


class NonPositiveDelta(PrePostError, ValueError):
    pass


class IncompleteMeasurement(PrePostError, ArithmeticError):
    """Sum of F^dagger F deviates from the identity beyond tolerance."""


class GridTooCoarse(PrePostError, ValueError):
    pass


class GridTooNarrow(PrePostError, ValueError):
    pass


class BasisNotOrthonormal(PrePostError, ValueError):
    pass


class InvalidQuantumNumber(PrePostError, ValueError):
    pass
