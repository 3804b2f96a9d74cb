"""Exception and warning types shared across the workbench."""


class BesovLabError(Exception):
    """Base class for all workbench errors."""


class ParameterDomainError(BesovLabError, ValueError):
    """A parameter lies outside the mathematical domain of the operation."""


class DomainExceededError(BesovLabError, ValueError):
    """A shift or kernel does not fit inside the sampled domain."""


class CoverageError(BesovLabError, ValueError):
    """A sampled curve does not cover the requested evaluation range."""


class OptimizerDivergedError(BesovLabError, RuntimeError):
    """The ascent produced a non-finite objective."""


class InvalidWeightError(BesovLabError, ValueError):
    """A weight function failed its monotonicity or growth-flag validation."""


class QuadratureOrderError(BesovLabError, ValueError):
    """Quadrature order too small for the requested polynomial degree."""


class UsageError(BesovLabError, ValueError):
    """Malformed CLI invocation or config file."""


class UnresolvedScaleWarning(UserWarning):
    """The requested scale is below one grid cell; the result is 0 by convention."""


class ExtrapolationWarning(UserWarning):
    """Off-node evaluation required deriving a coefficient form from node values."""
