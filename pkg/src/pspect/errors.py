"""Exception types shared across the package."""


class PspectError(Exception):
    """Base class for package errors."""


class ConfigError(PspectError):
    """Invalid run configuration (CLI exit code 1)."""


class PreconditionError(PspectError, ValueError):
    """A documented operation precondition was violated."""


class NegativeSequenceAbsent(PreconditionError):
    """Negative eigenvalue sequence requested but the weight has no negative part."""


class IntegrationError(PspectError):
    """The initial-value integrator failed to reach r = 1."""

    def __init__(self, message, last_r=None):
        super().__init__(message)
        self.last_r = last_r
