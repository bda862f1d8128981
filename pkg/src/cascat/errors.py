"""Exception types for numerical and configuration failure modes."""


class CascatError(Exception):
    """Base class for all cascat-specific errors."""


class TruncationError(CascatError):
    """Fock-space cutoff too small for the requested tail tolerance."""


class DegeneratePostselectionError(CascatError):
    """Conditional measurement has (numerically) zero heralding probability."""


class DegenerateConfigurationError(CascatError):
    """Closed-form evaluation undefined (alpha = 0 or vanishing X0);
    callers should fall back to the brute-force cascade."""


class ConventionMismatchError(CascatError):
    """Closed-form phase-space evaluation disagrees with the numeric
    reference beyond tolerance."""


class BudgetExceededError(CascatError):
    """Requested parameter scan exceeds the evaluation budget."""
