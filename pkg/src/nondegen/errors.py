"""Exception hierarchy shared by all modules."""


class NondegenError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(NondegenError, ValueError):
    """An argument lies outside the admissible domain."""


class DivergenceError(NondegenError):
    """An integral does not converge for the given input (decay too slow)."""


class PoleError(DomainError):
    """Evaluation at the excluded pole of the stereographic chart."""


class SamplingError(NondegenError):
    """A sample set is degenerate for the requested fit."""


class FitError(NondegenError):
    """A log-log decay fit cannot be carried out on the given samples."""


class NumericalError(NondegenError):
    """A numerical procedure failed to converge or reach its accuracy target."""


class StructuralMismatchError(NumericalError):
    """Two independent computations disagree beyond a constant normalization."""
