"""Exception hierarchy shared by all modules."""


class ArtifactError(Exception):
    """Base class for every error raised by primepatterns."""


class CapacityError(ArtifactError):
    """A computation would exceed its configured memory or work budget."""

    def __init__(self, message, estimated_cost=None):
        super().__init__(message)
        self.estimated_cost = estimated_cost


class DomainError(ArtifactError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class TableRangeError(ArtifactError, IndexError):
    """A sieved table does not cover the requested argument."""

    def __init__(self, message, required_bound=None):
        super().__init__(message)
        self.required_bound = required_bound


class HypothesisError(ArtifactError):
    """A polynomial family fails a structural hypothesis needed by an operation."""


class ContractError(ArtifactError):
    """User-supplied data violates a documented contract (periodicity, support, ...)."""


class FamilyParseError(ArtifactError, ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position
