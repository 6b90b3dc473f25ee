"""Exception types raised across the package."""


class HolotransportError(Exception):
    """Base class for all package errors."""


class StructuralError(HolotransportError, ValueError):
    """A matrix fails a Hermiticity, unitarity, idempotency or shape check."""


class DegeneracyError(HolotransportError, ValueError):
    """Rank deficiency or a vanishing quantity that a formula divides by."""


class GridError(HolotransportError, ValueError):
    """Incompatible or under-resolved time grids."""


class TangencyError(HolotransportError, ValueError):
    """A vector is not tangent to the Stiefel manifold at the given frame."""


class OpenLoopError(HolotransportError, ValueError):
    """A subspace path that must be closed is not."""


class CodimensionError(HolotransportError, ValueError):
    """The computational space has codimension smaller than its dimension."""


class VerificationError(HolotransportError):
    """A verification clause failed; ``report`` carries the measured values."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
