"""Exception hierarchy.

Two families matter to callers: ``ValidationError`` (bad input or config,
CLI exit code 1) and ``NumericalGuard`` (a numerical precondition failed,
CLI exit code 2).
"""


class ThreshlabError(Exception):
    pass


class ValidationError(ThreshlabError, ValueError):
    pass


class NumericalGuard(ThreshlabError, ArithmeticError):
    pass


# kernels
class NotExpBounded(ValidationError):
    pass


class FitFailed(NumericalGuard):
    pass


# convops
class ExtentTooSmall(NumericalGuard):
    pass


class PowerOverflow(NumericalGuard):
    pass


# tailtheory
class WrongRegime(ValidationError):
    pass


class Underflow(NumericalGuard):
    pass


class BelowThreshold(ValidationError):
    pass


# criteria
class InvalidNonlinearity(ValidationError):
    pass


class BadLevels(ValidationError):
    pass


class CriterionVacuous(NumericalGuard):
    pass


# simulator
class CFLViolation(NumericalGuard):
    pass


class PlateauTooWide(ValidationError):
    pass


class NoCrossing(NumericalGuard):
    pass


# waves
class NoWave(NumericalGuard):
    pass


class ConstructionFailed(NumericalGuard):
    pass


# thresholds
class NoPropagationFound(NumericalGuard):
    pass


class InsufficientData(ValidationError):
    pass


# cli
class ParseError(ValidationError):
    pass
