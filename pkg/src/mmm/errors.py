"""Exception hierarchy shared by every module of the package."""


class MMMError(Exception):
    """Base class for all errors raised by :mod:`mmm`."""


class DimensionError(MMMError, ValueError):
    """Operands have incompatible shapes."""


class AmbientError(MMMError, ValueError):
    """A matrix does not belong to the ambient space it is claimed to live in."""


class SpecError(MMMError, ValueError):
    """Chart or pattern parameters violate their invariants."""


class SingularMetricError(MMMError, ArithmeticError):
    """A tangent frame is degenerate, so its Gram matrix cannot be inverted."""


class StepError(MMMError, ValueError):
    """A finite-difference step falls outside the chart's parameter box."""
