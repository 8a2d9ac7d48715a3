"""
Exception types raised by the heckelab library.

Every error derives from HeckelabError and from the builtin a caller would
naturally catch (ValueError or ArithmeticError), so generic handlers keep
working.
"""

from typing import Any, Dict, Optional


class HeckelabError(Exception):
    """Base class for all heckelab errors."""


class ArithmeticOverflowError(HeckelabError, ArithmeticError):
    """An exact integer left the signed 64-bit range."""


class DegenerateInputError(HeckelabError, ValueError):
    """An input that the operation cannot normalise (e.g. the zero quaternion)."""


class InvalidRotationError(HeckelabError, ValueError):
    """A matrix that is not a proper rotation."""


class EmptyLevelError(HeckelabError, ValueError):
    """A Hecke level n with n not congruent to 1 mod 4."""


class NonSymmetricMatrixError(HeckelabError, ValueError):
    """A matrix handed to the symmetric eigensolver is not symmetric."""


class DegeneracyUnresolvedError(HeckelabError, ArithmeticError):
    """Joint diagonalization did not reach the requested residual."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InvalidWindowError(HeckelabError, ValueError):
    """Spectral window parameters out of range."""


class InvalidPointError(HeckelabError, ValueError):
    """A point outside the domain of the operation."""


class EnumerationBoundOverflowError(HeckelabError, ArithmeticError):
    """The enumeration box for a lattice count is too large or not tight."""


class DegenerateProfileError(HeckelabError, ValueError):
    """A counting profile that cannot support the requested fit."""


class InsufficientDataError(HeckelabError, ValueError):
    """Too few samples or rows for a fit."""


class MissingLevelError(HeckelabError, ValueError):
    """Eigendata lacks a Hecke level that the computation needs."""


class InsufficientCoverageError(HeckelabError, ValueError):
    """Eigendata does not cover the degrees a spectral sum needs."""


class UnderResolvedError(HeckelabError, ValueError):
    """A sup-norm grid below the sampling threshold for its degree."""


class InvalidKTypeError(HeckelabError, ValueError):
    """A K-type weight l with |l| > k."""


class ConfigError(HeckelabError, ValueError):
    """Malformed or unknown configuration entry."""


class EigensolverConvergenceError(HeckelabError, ArithmeticError):
    """The Jacobi eigensolver hit its sweep cap above the off-diagonal tolerance."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
