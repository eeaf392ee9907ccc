"""Exception types shared across the toolkit.

Every error that a caller can meaningfully react to gets its own class;
nothing here is ever raised silently swallowed or downgraded to a warning.
"""


class MahlerToolsError(Exception):
    """Base class for all toolkit errors."""


class PrecisionCapExceeded(MahlerToolsError):
    """A refinement loop hit the configured bits cap before certifying.

    Also raised when an enclosure overflows the floating-point exponent
    range, since no finite precision can represent the result.
    """


class DivisorContainsZero(MahlerToolsError):
    """Division was requested by a ball that cannot be bounded away from zero."""


class ZeroPolynomialError(MahlerToolsError):
    """An operation that needs a nonzero polynomial got the zero polynomial."""


class NotIrreducible(MahlerToolsError):
    """A primitive irreducible polynomial was required."""


class IsolationFailure(MahlerToolsError):
    """Root disks could not be made pairwise disjoint within the bits cap."""


class CapExceeded(MahlerToolsError):
    """Enumeration index exceeds the configured maximum."""


class BudgetExceeded(MahlerToolsError):
    """A search space is larger than the configured candidate budget."""


class UndecidableZero(MahlerToolsError):
    """A candidate value straddles zero and cannot be refined further."""


class Undecidable(MahlerToolsError):
    """A predicate could not be certified either way within the bits cap."""
