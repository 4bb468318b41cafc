"""A set of custom exceptions."""

__all__ = [
    "DegenerateElementError",
    "DesignError",
    "DesignParseError",
    "DomainError",
    "FileExtensionError",
    "InfeasibleDesignError",
    "InvalidBasisError",
    "InvalidDimensionError",
    "InvalidProbabilityError",
    "InvalidStateError",
    "NonEstimatingDirectionError",
    "OvercompleteDesignError",
    "SingularDesignError",
    "UnderdeterminedDesignError",
    "UnphysicalPriorError",
    "ValidationError",
]


class ValidationError(Exception):
    """An error indicating that data-object does not comply with the guidelines."""


class InvalidDimensionError(ValidationError):
    """An error indicating an unsupported Hilbert space dimension or mismatching matrix shapes."""


class InvalidStateError(ValidationError):
    """An error indicating that a matrix is not a valid (unit-trace, Hermitian) density matrix."""


class InvalidBasisError(ValidationError):
    """An error indicating that a vector family or operator basis is not orthonormal."""


class InvalidProbabilityError(ValidationError):
    """An error indicating probabilities (or relative frequencies) outside of [0, 1]."""


class UnphysicalPriorError(ValidationError):
    """An error indicating prior parameters that describe states outside of the state space."""


class DomainError(ValidationError):
    """An error indicating arguments outside of the domain of a closed-form expression."""


class NonEstimatingDirectionError(ValidationError):
    """An error indicating a measurement direction that carries no information on the unknown coordinate."""


class DesignError(Exception):
    """An error indicating a numerical failure of a measurement design."""


class UnderdeterminedDesignError(DesignError):
    """An error indicating that a design has too few outcomes for the unknown parameters."""


class OvercompleteDesignError(DesignError):
    """An error indicating that a design has more outcomes than the linear estimator can use."""


class SingularDesignError(DesignError):
    """An error indicating that the design matrix ``T`` is (numerically) singular."""


class DegenerateElementError(DesignError):
    """An error indicating a vanishing POVM element."""


class InfeasibleDesignError(DesignError):
    """An error indicating that no feasible design was found."""


class FileExtensionError(Exception):
    """An error indicating that the file name has the wrong file extension."""


class DesignParseError(Exception):
    """An error indicating issues while parsing design or prior data."""
