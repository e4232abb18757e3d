"""Exception types shared across the package."""


class GsunError(Exception):
    """Base class for all package-specific errors."""


class NotPositiveDefinite(GsunError):
    """Matrix failed Cholesky factorization even after the jitter retry."""


class NoConvergence(GsunError):
    """An iterative routine exhausted its iteration budget."""


class DomainError(GsunError, ValueError):
    """Argument outside the mathematical domain of a special function."""


class ShapeMismatch(GsunError, ValueError):
    """Array shapes are inconsistent with the operation's contract."""


class DimensionMismatch(ShapeMismatch):
    """Objects built over different dimensions were combined."""


class IndexOutOfRange(GsunError, IndexError):
    """An index set refers to entries that do not exist."""


class SingularBlock(GsunError):
    """A matrix block that must be invertible is numerically singular."""


class AcceptanceTooLow(GsunError):
    """Neither rejection nor Gibbs sampling is feasible for the spec."""


class MissingSelfLoop(GsunError, ValueError):
    """A graph-attention neighbor list is missing the node itself."""


class NotScalarLoss(GsunError, ValueError):
    """backward() was asked to differentiate a non-scalar tensor."""


class TapeReused(GsunError, RuntimeError):
    """backward() was called twice on the same tape without a reset."""


class BracketFailure(GsunError):
    """Root bracketing failed while inverting a monotone transform."""


class DuplicateLocation(GsunError, ValueError):
    """Prediction and observation locations overlap or repeat."""


class NonFiniteLoss(GsunError):
    """Training produced a non-finite loss; carries the offending draw."""

    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta
