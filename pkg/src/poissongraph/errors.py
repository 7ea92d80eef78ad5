"""Shared exception types."""


class KernelSpecError(ValueError):
    """A kernel JSON document is malformed; the message names the offending field."""


class ConfigError(ValueError):
    """An experiment configuration is invalid."""


class CapacityError(RuntimeError):
    """A request exceeds a hard capacity limit (exact solver size, memory cap)."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""
