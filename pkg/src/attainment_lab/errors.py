"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operand shapes do not line up."""


class UnsupportedProblemError(ValueError):
    """The problem lacks the structure an analytic routine relies on."""


class NumericalError(RuntimeError):
    """An iterative routine failed to converge or broke down."""


class ConsistencyError(NumericalError):
    """Two independent computations of the same quantity disagree."""
