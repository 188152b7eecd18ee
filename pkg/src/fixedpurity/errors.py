"""Exception types shared across the package.

The CLI maps these onto exit codes: DomainError and subclasses exit 3,
ToleranceError exits 4, argparse usage errors exit 2.
"""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DimensionError(DomainError):
    """A dimension argument is invalid or inconsistent."""


class InfeasibleContextError(DomainError):
    """A conditioning value admits no legal coordinate interval."""


class OutOfChamberError(DomainError):
    """Coordinates violate the ordered-eigenvalue chamber constraints."""


class ToleranceError(RuntimeError):
    """A numerical routine could not reach its required tolerance."""
