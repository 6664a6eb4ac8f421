class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ConfigurationError(ValueError):
    """A required configuration field is missing or inconsistent."""


class GateError(DomainError):
    """A physics validity gate (resonance, parity, long-time) is violated."""


class RegimeWarning(UserWarning):
    """Advisory: parameters approach the edge of the model's validity."""


class ConditioningWarning(UserWarning):
    """Advisory: a numerical route is expected to be poorly conditioned."""
