"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ValidationError -> 1,
BudgetExceededError -> 2, PropertyViolationError -> 3.
"""


class ValidationError(ValueError):
    """Bad input: malformed config, violated precondition, inconsistent model."""


class BudgetExceededError(RuntimeError):
    """A state-space or iteration budget was exceeded before the task finished."""


class PropertyViolationError(RuntimeError):
    """A property the chain machinery relies on was measurably violated."""
