"""Exception hierarchy.

``ConfigurationError`` covers bad inputs; everything under ``NumericalError``
signals that a computation could not be completed on the chosen grid.
"""


class ConfigurationError(ValueError):
    """Invalid parameter or incompatible configuration."""


# Alias used by the grid/pdf helpers, which speak of parameters rather than configs.
ParameterError = ConfigurationError


class NumericalError(ArithmeticError):
    pass


class DegenerateRegionError(NumericalError):
    """A quantizer region carries (numerically) zero probability."""


class GridOverflowError(NumericalError):
    """Too much probability mass left the grid span."""

    def __init__(self, escaped, tolerance):
        super().__init__(f"escaped mass {escaped:.3e} >= tolerance {tolerance:.1e}; widen the grid")
        self.escaped = escaped


class NonConvergenceError(NumericalError):
    """Lloyd iteration hit ``max_iterations``; ``last`` holds the final iterate."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class InsufficientDataError(NumericalError):
    pass
