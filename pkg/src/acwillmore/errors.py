"""Shared exception types."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class SingularityError(ValueError):
    """Evaluation requested at or inside the excluded region |x| <= 1."""


class NonConvergenceError(RuntimeError):
    """A truncated series cannot certify its tail bound at the allowed degree."""


class OutOfPlateauError(ValueError):
    """Closed-form expression requested outside its plateau of validity."""


class BracketingError(RuntimeError):
    """A one-dimensional root could not be bracketed from valid inputs."""


class HypothesisViolation(UserWarning):
    """Sampled check found an input violating a required hypothesis."""
