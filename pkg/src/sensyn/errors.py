"""Exception hierarchy shared across the package."""


class SensynError(Exception):
    """Base class for all package-specific errors."""


class InputDomainError(SensynError, ValueError):
    """An argument lies outside the operation's domain."""


class ZeroVarianceError(SensynError, ArithmeticError):
    """A ratio quantity was requested for a model with zero sample variance."""


class DegenerateSpectrumError(SensynError, ArithmeticError):
    """Spectrum-derived quantity requested for an all-zero spectrum."""


class UnsupportedModelError(SensynError, ValueError):
    """The requested closed-form result is not available for this model."""
