"""Exception taxonomy shared by all modules.

The class a failure belongs to decides the CLI exit code: input and
validation problems exit 2, numeric failures (poles, imaginary
characteristic time, divergence, degenerate designs) exit 3, and fit
non-convergence exits 4.
"""

from __future__ import annotations


class MacrofieldError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class InputError(MacrofieldError):
    """Invalid input data, parameters, or configuration."""

    exit_code = 2


class SchemaError(InputError):
    """A required column is missing or an unexpected one is present."""


class GapError(InputError):
    """Years are not contiguous; the message names the missing years."""


class ValidationError(InputError):
    """A record or argument violates a domain invariant."""


class ParameterError(InputError):
    """Model or rate-function parameters outside their allowed range."""


class DomainError(InputError):
    """An input value lies outside a formula's domain (e.g. H <= 0)."""


class NumericError(MacrofieldError):
    """Numeric failure during evaluation."""

    exit_code = 3


class PoleError(NumericError):
    """A denominator passed below the division guard."""


class ImaginaryTimeError(NumericError):
    """Characteristic time requested where the discriminant is >= 0."""


class DegenerateError(NumericError):
    """Rank-deficient design matrix or degenerate chain endpoint."""


class NoMaximumError(NumericError):
    """Quadratic opens upward; no capital maximum exists."""


class SingularityError(NumericError):
    """A formula was evaluated exactly at its singular point."""


class FitError(MacrofieldError):
    """Iterative fit failed to converge; message carries diagnostics."""

    exit_code = 4
