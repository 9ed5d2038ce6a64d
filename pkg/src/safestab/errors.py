"""Exception types raised by the library."""


class SafeStabError(Exception):
    """Base class for all library errors."""


class DomainError(SafeStabError, ValueError):
    """An operation was called outside its precondition (e.g. incompatible data)."""


class EvaluationError(SafeStabError, ArithmeticError):
    """A user-supplied field returned a non-finite value."""

    def __init__(self, message, state=None, field=None):
        super().__init__(message)
        self.state = state
        self.field = field


class IntegrationError(SafeStabError, ArithmeticError):
    """The integrator produced a non-finite state."""

    def __init__(self, message, step=None, state=None):
        super().__init__(message)
        self.step = step
        self.state = state


class InconsistencyError(SafeStabError, RuntimeError):
    """Lie data that a valid CLF/CBF pair can never produce.

    Raised when the safety-prioritizing branch is reached with a vanishing
    barrier coefficient; this signals an invalid CLF/CBF pair rather than a
    numerical accident.
    """
