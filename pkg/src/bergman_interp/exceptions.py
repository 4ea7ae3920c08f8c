"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point or parameter lies outside the region where a formula is valid."""


class HypothesisError(ValueError):
    """A sufficient condition for interpolation is violated.

    The message names the violated inequality.
    """

    def __init__(self, inequality: str, detail: str = ""):
        self.inequality = inequality
        msg = f"hypothesis violated: {inequality}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class SingularGramError(ArithmeticError):
    """The kernel Gram matrix is numerically singular."""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"Gram matrix is singular (condition number {condition:.3e})")


class ConvergenceError(RuntimeError):
    """An iterative method stopped without meeting its tolerance."""
