"""Exception hierarchy.

Every domain error derives from :class:`PoissonQIError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class PoissonQIError(ValueError):
    """Base class for all domain errors raised by this package."""


class NotHermitian(PoissonQIError):
    pass


class NegativeEigenvalue(PoissonQIError):
    pass


class FunctionUndefined(PoissonQIError):
    pass


class DimensionMismatch(PoissonQIError):
    pass


class LengthMismatch(DimensionMismatch):
    pass


class NotNormalized(PoissonQIError):
    pass


class NegativeN(PoissonQIError):
    pass


class NegativeIntensity(PoissonQIError):
    pass


class SOutOfRange(PoissonQIError):
    pass


class DerivativeOutsideSupport(PoissonQIError):
    pass


class SingularLyapunov(PoissonQIError):
    pass


class ZeroIntensityWithDerivative(PoissonQIError):
    pass


class InvalidChannel(PoissonQIError):
    pass


class RarityViolated(InvalidChannel):
    pass


class ModeCountMismatch(PoissonQIError):
    pass


class SupportViolation(PoissonQIError):
    pass
