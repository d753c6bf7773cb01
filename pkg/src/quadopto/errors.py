"""Exception types raised by the simulation modules."""


class QuadOptoError(Exception):
    """Base class for all package errors."""


class ConfigError(QuadOptoError, ValueError):
    """Malformed parameter file or override."""


class NoSteadyStateError(QuadOptoError):
    """No physical steady state survived root filtering.

    ``candidates`` holds every root of the steady-state polynomial and
    ``rejected`` maps each discarded root to the reason it was dropped.
    """

    def __init__(self, message, candidates=(), rejected=None):
        super().__init__(message)
        self.candidates = list(candidates)
        self.rejected = dict(rejected or {})


class InstabilityError(QuadOptoError):
    """The requested operating point is dynamically unstable."""


class SingularSystemError(QuadOptoError, ArithmeticError):
    """Linear response system is singular (marginally stable point)."""


class DegeneratePolynomialError(QuadOptoError, ValueError):
    """Leading coefficient vanishes, so the polynomial has lower degree."""


class PeakClassificationError(QuadOptoError):
    """Zeros of D(omega) do not have the expected mirror-pair structure."""

    def __init__(self, message, raw_roots=()):
        super().__init__(message)
        self.raw_roots = list(raw_roots)


class ImaginaryFrequencyError(QuadOptoError, ArithmeticError):
    """Approximate peak formula produced a negative squared frequency."""
