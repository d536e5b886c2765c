"""Exception types shared across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(EngineError):
    """A config document is missing required content or is self-contradictory."""


class ValidationError(EngineError):
    """An input value violates a documented contract.

    ``problems`` optionally carries (field, message) pairs for structured
    reporting (CLI messages, HTTP 422 bodies).
    """

    def __init__(self, message: str, problems: list[tuple[str, str]] | None = None):
        super().__init__(message)
        self.problems = list(problems or [])


class DomainError(EngineError):
    """A numeric argument is outside the mathematical domain of an operation."""


class ParseError(EngineError):
    """Structured content could not be extracted from generated text."""


class IngestionError(EngineError):
    """A document could not be turned into chunks."""


class RetrievalError(EngineError):
    """Retrieval was asked of an index that cannot serve it."""


class StoreError(EngineError):
    """An exemplar store rejected an insert (duplicate id, dimension clash)."""


class GatewayError(EngineError):
    """Base for backend access failures; always carries the profile name."""

    def __init__(self, profile: str, message: str):
        super().__init__(f"[{profile}] {message}")
        self.profile = profile


class TransportError(GatewayError):
    """The request never produced an HTTP response (DNS, refused, reset)."""


class GatewayTimeout(TransportError):
    """The backend did not answer within the profile's timeout."""


class BackendStatusError(GatewayError):
    """The backend answered with a non-2xx status."""

    def __init__(self, profile: str, status: int, message: str = ""):
        super().__init__(profile, message or f"backend returned status {status}")
        self.status = status


class ProtocolError(GatewayError):
    """The backend answered 2xx but the body violates the wire contract."""


class JobError(EngineError):
    """One generation job failed; ``stage`` attributes the failing step."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
