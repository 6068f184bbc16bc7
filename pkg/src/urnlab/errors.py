"""Exception hierarchy shared by all urnlab modules."""


class UrnError(Exception):
    """Base class for every error raised by urnlab."""


class SpecError(UrnError):
    """Invalid urn specification (bad input file, non-affine column, ...)."""


class BalanceViolation(SpecError):
    pass


class TenabilityViolation(SpecError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("untenable urn: " + "; ".join(self.violations))


class InitialCountTooSmall(SpecError):
    pass


class DomainError(UrnError, ValueError):
    pass


class PoleError(UrnError, ZeroDivisionError):
    pass


class UnsupportedIndex(UrnError):
    """Requested quantity is not defined for this urn index / class."""


class SizeLimit(UrnError):
    pass


class ConvergenceFailure(UrnError):
    pass


class NearIntegerPole(UrnError):
    pass


class PrecisionLoss(UrnError):
    pass


class SlowConvergence(UrnError):
    """Series/extrapolation did not reach the requested tolerance.

    The best available estimate is attached as ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
