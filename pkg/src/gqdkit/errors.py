"""Exception types shared across the package."""


class StateValidationError(ValueError):
    """Input does not describe a valid two-qubit state, family, or file."""


class NumericalContractError(ArithmeticError):
    """An internal numerical guarantee was violated; signals an upstream bug."""
