"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the set where the quantity is defined."""


class NumericalFailure(RuntimeError):
    """A numerical procedure did not reach its accuracy target.

    Parameters
    ----------
    message
        Human readable description.
    estimate
        Best available estimate of the quantity, if any.
    error
        Error bound attached to ``estimate``, if any.
    samples
        Raw samples that led to the failure (used by extrapolation).
    """

    def __init__(self, message, estimate=None, error=None, samples=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.samples = samples


class ConstructionRejected(Exception):
    """No deformed algebra can be built from the given weight.

    The attached :class:`~dhoa.algebra.DiagnosticsReport` lists every
    necessary check with its status; ``reason`` names the first failure.
    """

    def __init__(self, report):
        self.report = report
        self.reason = report.reason
        super().__init__(report.reason)
