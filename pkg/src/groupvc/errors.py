"""Exception types shared across the package."""


class GroupValidationError(ValueError):
    """A Cayley table or subset failed structural validation."""


class BudgetExceededError(RuntimeError):
    """An exact search refused to continue past its configured work budget."""

    def __init__(self, message: str, nodes: int | None = None):
        super().__init__(message)
        self.nodes = nodes


class InternalCheckError(RuntimeError):
    """An internal consistency assertion failed; indicates a bug, never expected."""
