class DomainError(ValueError):
    """Raised when an argument lies outside the mathematical domain of an operation."""
