"""Exception hierarchy shared by every module.

Each class carries an ``exit_code`` so the command line can map failures to
distinct process statuses without a lookup table of its own.
"""

from __future__ import annotations


class ZetaLabError(Exception):
    exit_code = 1


class DomainError(ZetaLabError, ValueError):
    """Argument outside the region where an evaluator is valid."""

    exit_code = 3


class PoleError(DomainError):
    """Evaluation requested too close to a pole."""

    exit_code = 4


class DegeneracyError(ZetaLabError, ArithmeticError):
    """A torus character is trivial on the rotation (theta in 2*pi*Z)."""

    exit_code = 5


class ConvergenceError(ZetaLabError, ArithmeticError):
    """Truncation or overflow prevents reaching the requested accuracy."""

    exit_code = 6


class UnsupportedInstanceError(ZetaLabError, NotImplementedError):
    exit_code = 7


class ConfigError(ZetaLabError, ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    exit_code = 2

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class EvaluationFailure(ZetaLabError):
    """A scan aborted at a specific shift index."""

    exit_code = 8

    def __init__(self, k: int, cause: BaseException):
        self.k = k
        self.cause = cause
        super().__init__(f"evaluation failed at shift k={k}: {cause}")
