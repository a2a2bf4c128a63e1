"""Error taxonomy shared by the library and the command line."""


class RedactevalError(Exception):
    """Base class for toolkit errors."""


class ConfigError(RedactevalError):
    """Invalid or incomplete run configuration (CLI exit code 1)."""


class DataError(RedactevalError):
    """Malformed or missing input data (CLI exit code 2)."""
