"""Shared exception types."""


class DomainError(ValueError):
    """A parameter is outside the mathematical domain of the requested formula.

    Raised instead of returning NaN so that callers (and the CLI, which maps
    this to its own exit code) can distinguish bad inputs from bugs.
    """


def require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)
