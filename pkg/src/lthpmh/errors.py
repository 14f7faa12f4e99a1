"""Exception hierarchy shared by the solver, tuner and oracle."""


class LTHPMError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(LTHPMError, ValueError):
    """A parameter or configuration value violates its declared range."""


class DomainError(LTHPMError, ArithmeticError):
    """A formula was evaluated outside the region where it is real and finite."""


class UnsupportedRegimeError(DomainError):
    """The series solution is only derived for a unit linear stiffness (lambda = 1)."""


class IntegrationBlowupError(DomainError):
    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite state at integration step {step}")


class InsufficientSpanError(DomainError):
    """Too few oscillations in a trajectory to measure a period."""
