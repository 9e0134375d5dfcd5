"""Exception and warning types shared across the package."""


class QCorrError(Exception):
    """Base class for all qcorr errors."""


class NotHermitianError(QCorrError):
    """Matrix fails the entrywise Hermiticity check."""


class NoConvergenceError(QCorrError):
    """Iterative diagonalization did not converge within the sweep cap."""


class DimensionOverflowError(QCorrError):
    """Tensor-product dimension exceeds the configured cap."""


class BadDimensionError(QCorrError):
    """Operation received a matrix of unsupported dimension."""


class UnphysicalError(QCorrError):
    """State violates a physicality constraint (weights, trace, spectrum)."""


class DomainError(QCorrError, ValueError):
    """Scalar argument outside its mathematical domain."""


class BadTransitionError(QCorrError, ValueError):
    """Transition is not one of the four labeled level pairs."""


class DegenerateGridError(QCorrError):
    """Fit grid carries no information about the fitted amplitude."""


class InconsistentRecordsError(QCorrError):
    """Measurement records are mutually inconsistent beyond the noise level."""


class HighTemperatureApproximationWarning(UserWarning):
    """High-temperature expansion used outside its validity range (J/T > 0.1)."""


class DecayHierarchyWarning(UserWarning):
    """Decay constants do not follow the expected t_c < T2n* < T2e < T1e order."""


class ChannelPositivityWarning(UserWarning):
    """Dephasing factor matrix is not PSD: the channel is not completely positive."""
