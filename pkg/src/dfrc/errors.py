"""Exception types raised across the package."""


class DFRCError(Exception):
    """Base class for all package errors."""


class InsufficientSequenceLengthError(DFRCError, ValueError):
    pass


class InvalidSeedError(DFRCError, ValueError):
    pass


class EmptyInputError(DFRCError, ValueError):
    pass


class ShapeError(DFRCError, ValueError):
    pass


class DegenerateTargetError(DFRCError, ValueError):
    pass


class DatasetError(DFRCError, ValueError):
    """Bad dataset content: too short, unparsable, or zero range."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(DFRCError, ValueError):
    pass


class StateDivergenceError(DFRCError, ArithmeticError):
    """A node produced a non-finite state.

    Attributes:
        step: flat θ-step index of the first non-finite state.
        last_state: the last finite state before it (0.0 at step 0).
    """

    def __init__(self, step: int, last_state: float = float("nan")):
        super().__init__(f"state diverged at step {step} (last finite state {last_state!r})")
        self.step = step
        self.last_state = last_state

    def __reduce__(self):
        return (type(self), (self.step, self.last_state))
