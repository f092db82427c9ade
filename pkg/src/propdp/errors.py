"""Exception taxonomy shared across the package.

ConfigError maps to CLI exit code 2, NumericError (and subclasses) to 3.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid user-supplied configuration or parameters."""


class NumericError(RuntimeError):
    """Internal numerical failure (bad covariance, non-finite values, ...)."""


class NonConvergenceError(NumericError):
    """An iterative solver failed to reach its tolerance.

    Carries the last iterate and residual so callers can report diagnostics.
    """

    def __init__(self, message: str, *, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
