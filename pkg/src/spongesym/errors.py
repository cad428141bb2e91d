"""Exception hierarchy shared by every module."""


class SpongeSymError(Exception):
    pass


class ConfigurationError(SpongeSymError, ValueError):
    """Inputs of incompatible shape or a missing/ill-typed parameter."""


class DomainError(SpongeSymError, ValueError):
    """Inputs outside the mathematical domain of an operation."""


class ResourceError(SpongeSymError, RuntimeError):
    """Enumeration cap, simulator capacity or attempt cap exceeded."""


class QueryBudgetExceeded(ResourceError):
    pass


class ContractViolation(SpongeSymError, RuntimeError):
    """A runtime precondition of a quantum subroutine did not hold."""
