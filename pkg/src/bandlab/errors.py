"""Exception hierarchy shared by all bandlab modules."""


class BandlabError(Exception):
    """Base class for all bandlab errors."""


class InvalidConfigError(BandlabError, ValueError):
    """A configuration object (dimension, band, run config) violates an invariant."""


class DomainError(BandlabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(BandlabError, ValueError):
    """Array or sequence dimensions do not match."""


class SubspaceValidationError(BandlabError, ValueError):
    """A coefficient matrix fails the orthonormality check."""


class RangeError(BandlabError, ValueError):
    """A parameter exceeds the exact-arithmetic or tabulation range."""


class CapacityError(BandlabError, RuntimeError):
    """A computation would exceed a configured size cap."""


class NumericError(BandlabError, RuntimeError):
    """A quadrature or eigensolver failed to converge."""
