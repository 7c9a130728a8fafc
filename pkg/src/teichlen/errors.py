"""Exception types raised across the package."""


class TeichlenError(Exception):
    """Base class for all package errors."""


class NotHyperbolic(TeichlenError):
    pass


class NoHyperbolicWord(TeichlenError):
    pass


class CapacityExceeded(TeichlenError):
    pass


class RootOfUnity(TeichlenError):
    pass


class SameAbsTrace(TeichlenError):
    pass


class ArithmeticityViolated(TeichlenError):
    def __init__(self, embedding_index, value):
        self.embedding_index = embedding_index
        self.value = value
        super().__init__(
            f"embedding {embedding_index}: |phi(t^2 - 2)| = {abs(value):.6g} > 2"
        )


class NoConsistentTwist(TeichlenError):
    pass


class NonPositiveBound(TeichlenError):
    pass


class DomainError(TeichlenError):
    pass


class InvalidConfig(TeichlenError):
    pass


class NonIntegral(UserWarning):
    """Warning: a field element failed the integrality check."""
