"""Exception types raised across the package."""


class DegenerateInstanceError(ValueError):
    """Raised when a mean matrix has a zero gap (duplicated means at the boundary)."""


class InsufficientBudgetError(ValueError):
    """Raised when a budget is too small to build a usable schedule."""


class InvalidScheduleError(ValueError):
    """Raised when a schedule violates the round/budget constraints."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("invalid schedule: " + "; ".join(self.violations))


class InvalidStateError(RuntimeError):
    """Raised when an algorithm is asked to score arms that were never pulled."""


class InstanceFormatError(ValueError):
    """Raised when an instance file cannot be parsed."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")
