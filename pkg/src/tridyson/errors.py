"""Exception hierarchy for tridyson."""
from __future__ import annotations


class TridysonError(Exception):
    """Base class for every error raised by the package."""


class RangeError(TridysonError, ValueError):
    """Minor range or matrix index outside the matrix."""


class DomainError(TridysonError, ValueError):
    """Arguments outside the domain of a formula."""


class ConvergenceError(TridysonError, RuntimeError):
    """An iterative solver did not converge."""


class AbsorbedStateError(TridysonError, RuntimeError):
    """A Bessel coordinate was stepped after hitting zero."""


class CollisionError(TridysonError, RuntimeError):
    """Spectrum is not simple where a formula requires it."""


class ConfigError(TridysonError, ValueError):
    """Invalid or incomplete experiment configuration."""
