"""Exception hierarchy shared across the engine."""


class SynthcurateError(Exception):
    """Base class for all engine errors."""


class ValidationError(SynthcurateError):
    """Input violates a documented precondition or invariant."""


class DomainError(SynthcurateError):
    """Input is structurally valid but outside the operation's domain
    (e.g. a zero-norm embedding, which signals a broken embedder)."""


class NumericError(SynthcurateError):
    """A non-finite value appeared where finite math was required."""


class TransportError(SynthcurateError):
    """Backend unreachable or returned a server-side failure after retries."""

    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts


class BackendError(SynthcurateError):
    """Backend reachable but refused or returned an application-level error."""


class FixtureMissError(BackendError):
    """A scripted mock backend was queried with a key it has no fixture for."""


class ConfigError(SynthcurateError):
    """Pipeline configuration is invalid or incomplete."""


class ManifestFormatError(SynthcurateError):
    """Manifest file has an unknown schema version or malformed contents."""
