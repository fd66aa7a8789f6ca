"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the admissible domain of a formula."""


class ParameterError(ValueError):
    """Problem parameters violate a structural requirement."""


class ConstructionError(ValueError):
    """An operator failed the structural check required to build it."""


class DivergenceError(RuntimeError):
    """A fixed-point iteration produced a non-finite iterate."""


class ConvergenceFailure(RuntimeError):
    """A reference solve did not reach the requested residual."""
