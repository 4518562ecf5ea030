"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A scalar argument is outside its legal range."""


class InvalidInputError(ValueError):
    """A structured input (matrix, vector, configuration) fails validation."""


class DecompositionError(InvalidInputError):
    """Matrix factorization failed, typically a non-positive-definite input."""


class DegenerateFitError(InvalidInputError):
    """A least-squares fit has numerically zero residual variance."""


class NumericalError(RuntimeError):
    """An iterative solver failed to converge within its budget."""
