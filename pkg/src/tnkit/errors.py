"""Exception hierarchy shared by all tnkit modules."""


class TnkitError(Exception):
    """Base class for tnkit errors."""


class DimensionError(TnkitError, ValueError):
    """Shapes, modes or factorizations are inconsistent."""


class RankError(TnkitError, ValueError):
    """A requested rank is invalid for the target."""


class SizeError(TnkitError, ValueError):
    """A dense object would exceed the configured element cap."""


class BaselineInfeasible(SizeError):
    """The dense baseline cannot be formed under the element cap.

    Benchmarks turn this into a ``baseline-infeasible`` row instead of
    aborting, mirroring the NA entries of a runtime table.
    """

    label = "baseline-infeasible"

    def __init__(self, message, elements=None, cap=None):
        super().__init__(message)
        self.elements = elements
        self.cap = cap


class SolverError(TnkitError, ArithmeticError):
    """A linear solve failed numerically."""

    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond


class TrainingError(TnkitError, RuntimeError):
    """Gradient descent diverged."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConfigError(TnkitError, ValueError):
    """Invalid command-line or config-file settings."""


class FormatError(TnkitError, ValueError):
    """A binary container is malformed or of the wrong type."""
