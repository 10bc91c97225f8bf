"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """Graph or experiment parameters outside their valid range."""


class NumericContractError(ArithmeticError):
    """A numerical guarantee (norm, invariance) was violated beyond tolerance."""


class NotInvariantError(NumericContractError):
    """A basis was expected to span an invariant subspace but does not."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InsufficientDataError(ValueError):
    """Too few distinct observations to fit a model."""
