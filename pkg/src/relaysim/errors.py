"""Exception types raised by relaysim."""


class ConfigurationError(ValueError):
    """Invalid constellation, CSI parameters or experiment config."""


class UsageError(ValueError):
    """An API was called with arguments violating its contract."""


class ProtocolStallError(RuntimeError):
    """No eligible relay link exists for a Max-Link decision."""
