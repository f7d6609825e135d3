"""Exception types shared across the package."""


class CwmError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(CwmError):
    """Vector/matrix shapes do not agree with the declared dimensions."""


class NotPositiveDefinite(CwmError):
    """Covariance factorization failed (a pivot <= 0)."""


class InvalidContamination(CwmError):
    """Contamination parameters outside their admissible range."""


class DegenerateDensity(CwmError):
    """A density evaluation underflowed to zero for every component."""


class SingularDesign(CwmError):
    """Weighted Gram matrix not invertible, or a component starved of mass."""


class InitializationFailure(CwmError):
    """Initialization produced an empty component after hard assignment."""


class KTooLarge(CwmError):
    """Exhaustive label matching requested for more components than supported."""


class DataError(CwmError):
    """Base class for dataset ingestion errors."""


class ParseError(DataError):
    """A row could not be parsed (wrong cell count, malformed structure)."""


class NonFiniteValue(DataError):
    """A cell is not a finite number."""


class HeaderMismatch(DataError):
    """CSV header does not match the declared column layout."""
