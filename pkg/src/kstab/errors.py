"""Exception types shared across the package."""


class KstabError(Exception):
    """Base class; `exit_code` is what the CLI returns when this escapes."""

    exit_code = 2


class UnboundedInput(KstabError):
    pass


class DimensionMismatch(KstabError):
    pass


class DegeneratePiece(KstabError):
    pass


class NotFullDimensional(KstabError):
    pass


class NotQCartier(KstabError):
    pass


class NonCompleteFan(KstabError):
    pass


class RayOutsideCone(KstabError):
    pass


class NonSmoothAmbient(KstabError):
    pass


class EmptyIdeal(KstabError):
    pass


class NotConvex(KstabError):
    pass


class CeilingTooLow(KstabError):
    pass


class NotSemiAmple(KstabError):
    pass


class NestingViolation(KstabError):
    pass


class TrivialFlag(KstabError):
    pass


class NonIntegralSlopes(KstabError):
    def __init__(self, msg, required_r=None):
        super().__init__(msg)
        self.required_r = required_r


class NotPolynomial(KstabError):
    pass


class KRangeExceeded(KstabError):
    pass


class MissingComponents(KstabError):
    pass


class TrivialConfiguration(KstabError):
    pass


class NotInLinearSystem(KstabError):
    pass


class NotInvariant(KstabError):
    pass


class NoExceptionalRays(KstabError):
    pass


class ProblemError(KstabError):
    """Malformed problem file; carries the offending field path."""

    def __init__(self, msg, field=None):
        super().__init__(msg)
        self.field = field


class CrossCheckFailure(KstabError):
    """Two independent computations disagree. Always a bug."""

    exit_code = 3
