"""Exception types shared across modules.

ConfigError maps to CLI exit code 1, NumericalError to exit code 2.
"""


class ConfigError(ValueError):
    """Invalid configuration: bad field values, inconsistent variants."""


class ShapeError(ConfigError):
    """Inconsistent array or layer shapes."""


class NumericalError(ArithmeticError):
    """Non-finite values or degenerate denominators at runtime."""
