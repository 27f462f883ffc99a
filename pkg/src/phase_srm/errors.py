"""Exception hierarchy shared by every module of the package."""


class PhaseSRMError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""


class ValidationError(PhaseSRMError, ValueError):
    pass


class EmptySpec(ValidationError):
    pass


class ZeroNorm(ValidationError):
    pass


class ZeroAmplitude(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class UnsupportedN(ValidationError):
    pass


class NonRealSpec(ValidationError):
    pass


class Overflow(PhaseSRMError, OverflowError):
    pass
