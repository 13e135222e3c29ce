"""Semi-supervised log anomaly detection with a deep Q-network agent."""

__version__ = "0.1.0"


class ConfigError(ValueError):
    """Invalid configuration value or combination of values."""


class ContractError(ValueError):
    """A documented precondition of an operation was violated."""
