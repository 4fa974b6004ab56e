"""Exception types raised across the package."""


class CharSumError(ValueError):
    """Base class for parameter and contract violations."""


class WindowEmpty(CharSumError):
    pass


class NotAUnit(CharSumError):
    pass


class NotPrime(CharSumError):
    pass


class ModulusTooLarge(CharSumError):
    pass


class LengthExceedsPeriod(CharSumError):
    pass


class DegenerateCase(CharSumError):
    pass


class DegenerateInput(CharSumError):
    pass


class BudgetExceeded(CharSumError):
    pass


class SpacingViolated(CharSumError):
    pass


class OverlapDetected(CharSumError):
    pass


class NotPrimitive(CharSumError):
    pass


class HTooSmall(CharSumError):
    pass


class PRangeEmpty(CharSumError):
    pass


class PDividesQ(CharSumError):
    pass


class MonotonicityViolated(CharSumError):
    pass


class InsufficientSpread(CharSumError):
    pass


class ConfigError(CharSumError):
    pass


class IoFailure(OSError):
    pass
