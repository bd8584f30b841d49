"""Error hierarchy for the matching pipeline.

Every error carries the process exit code the CLI reports for it.
"""


class KcmfError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1


class ConfigError(KcmfError):
    """Run configuration is invalid or references missing files."""

    exit_code = 2


class BackendError(KcmfError):
    """An LLM backend could not produce a completion."""

    exit_code = 3


class BackendAuthError(BackendError):
    """Credentials were rejected (401/403). Never retried."""


class BackendTimeoutError(BackendError):
    """Every attempt timed out."""


class RetriesExhaustedError(BackendError):
    """Transient failures persisted past the retry budget."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class MockScriptError(BackendError):
    """The mock backend received a prompt no script rule matches."""


class DataError(KcmfError):
    """Input data (pools, mentions, demonstrations, logs) is malformed."""

    exit_code = 4


class PseudoCodeError(DataError):
    """Pseudo-code text does not parse or is not exhaustive."""


class ReasoningError(DataError):
    """A condition trace is inconsistent with its pseudo-code."""


class TemplateError(DataError):
    """A prompt template references an unknown placeholder."""


class KnowledgeClientError(KcmfError):
    """A knowledge-base client request failed after retries."""


# Never downgraded to an undecided vote or a fallback
FATAL_BACKEND_ERRORS = (BackendAuthError, MockScriptError)
