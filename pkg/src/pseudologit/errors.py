"""Exception hierarchy.

Everything raised on purpose by the library derives from
:class:`PseudoLogitError`, so callers (the CLI in particular) can map
failures to exit codes without catching unrelated bugs.
"""


class PseudoLogitError(Exception):
    """Base class for library errors."""


class DomainError(PseudoLogitError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateSampleError(PseudoLogitError, ValueError):
    """The sample cannot identify the model (zero variance, too few rows, collinear)."""


class NonPositiveScaleError(PseudoLogitError, ValueError):
    """A moment estimator produced a negative or zero scale radicand."""


class SingularInformationError(PseudoLogitError, ArithmeticError):
    """The information matrix is not positive definite."""


class ConvergenceError(PseudoLogitError, RuntimeError):
    """An iterative procedure did not converge."""


class OptimizerInconsistencyError(PseudoLogitError, RuntimeError):
    """A restricted fit beat the unrestricted fit by more than numerical slack."""


class BootstrapFailureError(PseudoLogitError, RuntimeError):
    """Too many bootstrap or Monte Carlo replicates failed."""
