"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised when a scenario or call is configured inconsistently."""


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a formula."""
