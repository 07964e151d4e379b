"""Exception types shared across the package."""


class SuperPullError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatch(SuperPullError):
    """An operand's component count does not match the expected dimension."""


class MissingBinding(SuperPullError):
    """A symbol or function name required for numeric substitution is unbound."""


class OddComponentError(SuperPullError):
    """A superfield component is not in the even-monomial form an operation needs."""


class ParityMismatch(SuperPullError):
    """An operator coefficient does not carry the parity its slot requires."""


class ParseError(SuperPullError):
    """Expression text could not be parsed; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ContextError(SuperPullError):
    """An expression refers to generators or variables outside the declared context."""
