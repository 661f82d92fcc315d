"""Exception types shared across the package.

Everything inherits from DiffusimError so callers (notably the CLI) can map
library failures to a single exit code. Most classes also inherit a builtin
so idiomatic `except ValueError` call sites keep working.
"""


class DiffusimError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DiffusimError, ValueError):
    """Malformed input: bad parameters, broken invariants, parse failures."""


class GenerationError(DiffusimError, RuntimeError):
    """Randomized construction failed after the configured retry budget."""


class NotIrreducibleError(DiffusimError, ValueError):
    """Operation requires an irreducible chain but the matrix is reducible."""


class UnsupportedMatrixError(DiffusimError, ValueError):
    """The matrix violates a hypothesis of the requested operation
    (e.g. not symmetric, not reversible, not lazy)."""


class SizeLimitError(DiffusimError, ValueError):
    """Dense linear algebra requested above the configured size limit."""


class NonConvergentError(DiffusimError, ValueError):
    """The chain cannot converge (second eigenvalue magnitude is 1)."""


class NotConvergedError(DiffusimError, RuntimeError):
    """Iterative computation hit its step cap before meeting tolerance.

    Carries the partial value so callers can still inspect it.
    """

    def __init__(self, message, partial_value=None, t_stop=None):
        super().__init__(message)
        self.partial_value = partial_value
        self.t_stop = t_stop
