class GfpmulError(Exception):
    pass


# Field arithmetic


class OddBase(GfpmulError):
    pass


class CompositeModulus(GfpmulError):
    pass


class OutOfRange(GfpmulError):
    pass


class ShiftOutOfRange(GfpmulError):
    pass


# Transforms


class FactorizationFailure(GfpmulError):
    pass


class OrderUnavailable(GfpmulError):
    pass


class CheapModeViolation(GfpmulError):
    pass


class TableTooSmall(GfpmulError):
    pass


class PhaseMismatch(GfpmulError):
    pass


class LengthMismatch(GfpmulError):
    pass


# Multiplication plans


class PrimeNotFound(GfpmulError):
    pass


class Overflow(GfpmulError):
    pass


class NoValidBeta(GfpmulError):
    pass


class PlanFormatError(GfpmulError):
    pass


# Prime search and cost model


class SearchExhausted(GfpmulError):
    pass


class NoValidEta(GfpmulError):
    pass


class ProfileFormatError(GfpmulError):
    pass


# Command line


class OracleMismatch(GfpmulError):
    pass


class InputFormatError(GfpmulError):
    pass
