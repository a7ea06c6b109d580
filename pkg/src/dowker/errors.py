"""Exception hierarchy shared by all modules."""


class DowkerError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DowkerError):
    """Invalid user input: unknown labels, malformed files, bad parameters."""


class BudgetError(DowkerError):
    """A configured resource budget was exceeded (never silent truncation)."""

    def __init__(self, what: str, used: int, budget: int):
        super().__init__(f"{what}: {used} exceeds budget {budget}")
        self.what = what
        self.used = used
        self.budget = budget


class IntegrityError(DowkerError):
    """Internal consistency check failed (e.g. a boundary that does not square to zero)."""
