class CapacityError(ValueError):
    """Input exceeds a configured size limit of an exponential-time routine."""


class InsufficientDataError(ValueError):
    pass


class FormatError(ValueError):
    """Malformed serialized data (model files, archive lines)."""
