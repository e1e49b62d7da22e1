"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: usage/domain problems exit 1,
data ingestion problems exit 2, numerical failures exit 3.
"""


class MaxrootError(Exception):
    """Base class for all package-specific errors."""


class DomainError(MaxrootError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateRegimeError(DomainError):
    """Dimension triple puts the centering formulas outside their domain."""


class DataError(MaxrootError, ValueError):
    """Malformed input data (files, CSV layout, dimension mismatches)."""


class NumericalError(MaxrootError, RuntimeError):
    """A numerical procedure failed or lost too much precision."""


class NumericalInstabilityError(NumericalError):
    """ODE integration left its safety envelope (inconsistent boundary data)."""


class SingularPencilError(NumericalError):
    """A + B is not positive definite; the matrix pencil is singular."""


class PrecisionLossError(NumericalError):
    """Result would be dominated by floating-point cancellation/underflow."""


class NumericalWarning(UserWarning):
    """Non-fatal numerical notice (e.g. an eigenvalue clamped into [0, 1])."""
