"""Exception types shared across the package.

The CLI maps InputError to exit code 2 and NumericalError to exit code 3.
"""


class InputError(ValueError):
    """Raised when user-supplied data, configuration, or arguments are invalid."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine fails (non-convergence, singular gram, ...)."""
