"""Exception types raised across the package."""


class PostselError(Exception):
    """Base class for every error raised by postsel."""


class DegenerateState(PostselError, ValueError):
    """A zero or unnormalized vector where a normalized state is required."""


class SpaceMismatch(PostselError, ValueError):
    """Operands live on incompatible or overlapping Hilbert spaces."""


class PostselectionSingular(PostselError, ArithmeticError):
    """The postselection succeeds with (numerically) zero probability."""

    def __init__(self, message, overlap=0.0):
        super().__init__(message)
        # |<f|i>| or the surviving amplitude norm; small means ill-conditioned
        self.overlap = overlap


class IncompleteDecomposition(PostselError, ValueError):
    """Projectors passed to a sum rule do not resolve the identity."""


class InvalidTransmission(PostselError, ValueError):
    """A transmission probability outside [0, 1]."""


class UnsupportedShape(PostselError, ValueError):
    """A circuit that the weak-value shortcut cannot express."""


class StrengthZero(PostselError, ZeroDivisionError):
    """Measurement strength G = 0, where the normalized readout is 0/0."""


class InvalidStrength(PostselError, ValueError):
    """A strength grid value outside (0, 1] or a non-increasing grid."""


class InsufficientData(PostselError, ValueError):
    """Too few samples for a fit."""


class SumRuleViolation(PostselError, ValueError):
    """Target weak values that do not sum to one."""


class DegenerateTargets(PostselError, ValueError):
    """All target weak values are zero."""


class InvalidProbability(PostselError, ValueError):
    """A probability outside [0, 1]."""


class InvalidVisibility(PostselError, ValueError):
    """An interferometer visibility outside [0, 1]."""


class NotFound(PostselError, LookupError):
    """A scenario name or file that cannot be resolved."""
