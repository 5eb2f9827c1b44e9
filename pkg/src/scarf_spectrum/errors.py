"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Physical or configuration parameters violate a precondition."""


class DomainError(ValueError):
    """Argument lies outside the mathematical domain of the operation."""


class SingularPointError(DomainError):
    """Evaluation requested at a pole of a rational function."""


class ZeroPolynomialError(ValueError):
    """Root finding requested for the identically-zero polynomial."""


class PoleOnPathError(ArithmeticError):
    """A non-removable pole obstructs the wavefunction integration path."""


class CoefficientOverflowError(OverflowError):
    """Iteration coefficients exceeded the representable range (normalization off)."""
