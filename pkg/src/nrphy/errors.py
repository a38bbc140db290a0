"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid code, chain, or CLI configuration."""


class FormatError(ValueError):
    """Malformed packed-word stream or dump file."""


class PoolExhaustedError(RuntimeError):
    """No free soft buffer is available for a new HARQ packet."""


class UnknownProcessError(LookupError):
    """HARQ process id has no bound soft buffer."""
