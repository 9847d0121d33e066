"""Exception and warning types shared across the package."""


class AccuracyError(RuntimeError):
    """A numerical routine could not reach its accuracy target.

    Carries the achieved error estimate in ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class NoLimitError(RuntimeError):
    """Richardson extrapolation of a t -> 0 limit failed to settle."""


class UnsupportedSourceError(ValueError):
    """A source term falls outside the closed-form family an operation needs."""


class TruncationWarning(UserWarning):
    """Requested mode cutoff is too small for the target tail tolerance."""
