"""Exception hierarchy shared across the toolkit."""


class EgosumError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(EgosumError, ValueError):
    """An argument is outside its documented range."""


class ValidationError(EgosumError, ValueError):
    """A data structure violates one of its invariants.

    The message names the violated invariant.
    """


class FormatError(EgosumError):
    """A byte stream is not an EGSM file (bad magic, version, or framing)."""


class CorruptionError(EgosumError):
    """An EGSM file ends before its declared payload does."""


class InsufficientDataError(EgosumError, ValueError):
    """Too few samples for the requested operation."""


class MalformedResponseError(EgosumError):
    """A model response does not follow the expected structure."""


class TransportError(EgosumError):
    """Base for chat-transport failures."""


class TransientTransportError(TransportError):
    """Retryable transport failure (timeouts, rate limits, 5xx)."""


class PermanentTransportError(TransportError):
    """Non-retryable transport failure (auth, bad request)."""


class NarrationPipelineError(EgosumError):
    """Narration aborted after exhausting retries.

    Carries the last transport error and the partial log produced so far.
    """

    def __init__(self, message, last_error=None, partial_log=None):
        super().__init__(message)
        self.last_error = last_error
        self.partial_log = partial_log


class PipelineStageError(EgosumError):
    """A pipeline stage failed; ``stage`` names the module that raised."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


class ConfigError(EgosumError, ValueError):
    """A config file contains unknown keys or ill-typed values."""
