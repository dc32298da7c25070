"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class DivergenceError(ArithmeticError):
    """A latency series does not converge (detection probability is zero)."""


class NonConvergenceError(ArithmeticError):
    """A numerical series left too much residual mass after the term budget."""
