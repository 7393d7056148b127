"""Exception hierarchy for spinphase."""


class SpinPhaseError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SpinPhaseError, ValueError):
    """An argument lies outside the domain of an operation."""


class DegenerateStateError(SpinPhaseError, ValueError):
    """A superposition cancels to (numerically) zero norm."""


class GridTooCoarseError(DomainError):
    """The phase grid cannot resolve every harmonic of the density."""


class ConsistencyError(SpinPhaseError):
    """A numerical consistency check failed (negative populations, bad normalization)."""


class PeakError(SpinPhaseError, ValueError):
    """No peak, or an ambiguous peak, where a single peak was required."""


class ResolutionError(PeakError):
    """A feature is narrower than the grid can resolve."""


class UndefinedMeanError(SpinPhaseError, ValueError):
    """The circular mean is undefined (first moment vanishes)."""
