"""Exception types shared across the package."""


class PacError(Exception):
    """Base class for every error this package raises on purpose."""


class InvalidInputError(PacError):
    """Malformed or inconsistent input data."""


class DegeneratePhaseError(PacError):
    """Phase requested where the analytic modulus vanishes (or nearly does)."""


class EmptyResultError(PacError):
    """An operation would produce an empty signal."""


class AliasingError(PacError):
    """Filter center frequency at or above Nyquist."""


class SignalTooShortError(PacError):
    """Signal shorter than the filter kernel or the estimator minimum."""


class OutOfBandError(PacError):
    """A required band falls outside the representable frequency range."""


class InvalidMethodError(PacError):
    """Unknown coupling-measure identifier."""


class UnreliableEstimateError(PacError):
    """Spectral estimate would average fewer than two segments."""


class DegenerateDistributionError(PacError):
    """Phase-amplitude distribution has no amplitude mass."""
