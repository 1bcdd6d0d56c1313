"""Exception types shared across the package."""


class ConfigError(Exception):
    """Invalid or missing configuration. Maps to CLI exit code 2."""


class NumericalError(Exception):
    """Numerical failure during propagation (NaN/Inf, stability bound,
    probability drift). Maps to CLI exit code 3."""
