"""Exception hierarchy shared across the package."""


class GimtpError(Exception):
    """Base class for all library errors."""


class ShapeError(GimtpError):
    """Tensor or matrix dimensions do not line up."""


class ContractError(GimtpError):
    """A caller violated an operation's precondition."""


class ConfigError(GimtpError):
    """Invalid configuration document or value."""


class SchemaError(GimtpError):
    """Input file does not match the expected schema."""


class DataError(GimtpError):
    """Input data violates an invariant (bad frames, duplicates, ...)."""


class TargetLookupError(GimtpError):
    """Requested vehicle/frame combination does not exist."""


class NumericError(GimtpError):
    """Non-finite values surfaced where finite numbers are required."""
