"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented invariant or precondition."""


class SchemaError(ValueError):
    """Raised when a serialized document is malformed or has the wrong schema."""


class SearchSpaceError(ValidationError):
    """Raised when a brute-force solver is asked to enumerate too large a space."""
