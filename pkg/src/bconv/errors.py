"""Shared error and warning types."""


class BudgetExceededError(RuntimeError):
    """An operation refused to run because it would exceed its declared budget.

    Raised instead of silently truncating: enumeration sizes, quadrature cell
    counts and search table sizes are all checked up front.
    """


class BoundaryHazardWarning(UserWarning):
    """Atoms sat within 2^-45 of a cell boundary during key computation.

    The affected coordinates were shifted by +2^-44 (in key units) before
    flooring, so ties resolve deterministically upward.
    """
