"""Exception types shared by every module."""


class LivsicError(Exception):
    """Base class for library failures."""


class InputError(LivsicError, ValueError):
    """An input violates a documented precondition."""


class PoleError(InputError):
    """A function was evaluated at one of its poles."""

    def __init__(self, pole, message=None):
        self.pole = complex(pole)
        super().__init__(message or f"evaluation at pole {self.pole}")


class ConvergenceError(LivsicError, ArithmeticError):
    """A numerical routine could not produce a trustworthy answer."""
