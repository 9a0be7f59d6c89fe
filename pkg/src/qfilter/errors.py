"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: InvalidInputError -> 2,
InfeasibleError -> 3, NumericalError -> 4.
"""


class QFilterError(Exception):
    """Base class for all package errors."""


class InvalidInputError(QFilterError, ValueError):
    """Malformed or inconsistent caller input (bad norms, priors, ranges, schemas)."""


class ResourceLimitError(InvalidInputError):
    """A request exceeds a deliberate desk-scale bound."""


class InfeasibleError(QFilterError):
    """A requested construction does not exist for the given ensemble."""


class DegenerateDecompositionError(InfeasibleError):
    """The target state lies entirely inside the complement span, so the
    nonselective projective strategy has no conclusive target outcome."""


class NumericalError(QFilterError):
    """An internal numerical sanity check failed beyond tolerance."""
