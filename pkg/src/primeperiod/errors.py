"""Exception hierarchy. The CLI prints the class name on exit code 2."""


class PrimePeriodError(Exception):
    """Base class for every computation error raised by the package."""


class ResourceLimitError(PrimePeriodError):
    pass


class TooShortInputError(PrimePeriodError, ValueError):
    pass


class LogDomainError(PrimePeriodError, ValueError):
    pass


class NonMonotoneError(PrimePeriodError, ValueError):
    pass


class DegenerateHorizonError(PrimePeriodError, ValueError):
    pass


class DivergenceError(PrimePeriodError):
    pass


class NoPeakError(PrimePeriodError):
    pass


class NoMinimumError(PrimePeriodError):
    pass


class ZeroVarianceError(PrimePeriodError):
    pass


class WindowTooSmallError(PrimePeriodError, ValueError):
    pass


class NoLinearSegmentError(PrimePeriodError):
    pass


class InsufficientPrimesError(PrimePeriodError):
    def __init__(self, message, required_count=None):
        super().__init__(message)
        self.required_count = required_count
