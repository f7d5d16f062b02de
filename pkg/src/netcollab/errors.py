class ParseError(ValueError):
    """Malformed input file."""


class DimensionError(ValueError):
    """Arrays or vectors with incompatible shapes."""


class ConfigurationError(ValueError):
    """Invalid run, suite, or budget configuration."""
