"""Exact and asymptotic counts of monic polynomials over finite fields
by their number of distinct monic irreducible factors, globally, in
arithmetic progressions, and in short intervals."""

from .errors import BudgetExceededError, ConsistencyError, FFCountError, RootFindingError

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "ConsistencyError",
    "FFCountError",
    "RootFindingError",
    "__version__",
]
