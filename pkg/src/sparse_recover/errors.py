"""Exception types raised across the package."""


class SparseRecoverError(Exception):
    """Base class for all package errors."""


class InvalidParams(SparseRecoverError, ValueError):
    """Parameters violate a documented precondition."""


class InfiniteSet(InvalidParams):
    """The requested index set would be infinite."""


class LengthMismatch(SparseRecoverError, ValueError):
    pass


class DimensionMismatch(SparseRecoverError, ValueError):
    pass


class NotSolid(SparseRecoverError, ValueError):
    """An operation that needs a downward-closed index set got something else."""


class TooLarge(SparseRecoverError):
    """A materialized object would exceed the desk-scale size limit."""


class ValidityWindow(SparseRecoverError):
    """A study point leaves the band window of its test function."""


class Degenerate(SparseRecoverError, ValueError):
    """A fit has no spread in its abscissae."""
