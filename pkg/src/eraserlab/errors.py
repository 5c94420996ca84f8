"""Exception hierarchy.

Precondition failures derive from :class:`ValidationError` (a ``ValueError``);
the CLI maps them to exit code 2. Numerical non-convergence derives from
``RuntimeError`` and maps to exit code 3.
"""


class EraserLabError(Exception):
    pass


class ValidationError(EraserLabError, ValueError):
    pass


class NumericalError(EraserLabError, RuntimeError):
    pass


# maxent
class InfeasibleTargets(ValidationError):
    pass


class NonHermitianInput(ValidationError):
    pass


class NonCommutingObservables(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class EmptyPath(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


# energy erasure
class NonPositiveBeta(ValidationError):
    pass


class InvalidSchedule(ValidationError):
    pass


class TooManySteps(ValidationError):
    pass


class UnnormalizedDistribution(ValidationError):
    pass


# spin erasure
class InvalidN(ValidationError):
    pass


class MismatchedGamma(ValidationError):
    pass


class InvalidReservoir(ValidationError):
    pass


# central spin
class DimensionOverflow(ValidationError):
    pass


class NoUpSectorSupport(ValidationError):
    pass


class InvalidState(ValidationError):
    pass


# engine
class ConfigInvalid(ValidationError):
    pass


class IncompleteCycle(ValidationError):
    pass


class ZeroHeat(ValidationError):
    pass


# cli
class UnknownParameter(ValidationError):
    pass
