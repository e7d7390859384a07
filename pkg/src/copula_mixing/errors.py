"""Exception types shared across the package."""


class CopulaMixingError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(CopulaMixingError, ValueError):
    """A family parameter or weight vector is outside its admissible range."""


class BoundaryEvaluationError(CopulaMixingError, ValueError):
    """A conditional CDF was requested at u in {0, 1}."""


class InvalidEnvelopeError(CopulaMixingError, ValueError):
    """A minorization envelope cannot be a sub-density."""


class DegeneratePointError(CopulaMixingError, ValueError):
    """A ratio has a vanishing denominator at the requested point."""


class DegenerateFunctionError(CopulaMixingError, ValueError):
    """A test function has zero sample variance along a path."""


class NumericFailure(CopulaMixingError, RuntimeError):
    """An iterative or quadrature routine failed to meet its tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ConfigurationError(CopulaMixingError, ValueError):
    """A model or CLI configuration cannot be built."""


class SpecParseError(ConfigurationError):
    """A copula / target / proposal spec string is malformed."""
