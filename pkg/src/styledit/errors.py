"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1,
scoring/backend failures exit 2.
"""


class StyleTransferError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(StyleTransferError):
    """Bad configuration: unknown keys, missing files, invalid values."""


class ScoringError(StyleTransferError):
    """A scorer backend failed while evaluating a candidate.

    ``component`` names the failing part of the objective ("style",
    "fluency", "semantic") or the remote endpoint that misbehaved.
    """

    def __init__(self, message: str, *, component: str | None = None):
        super().__init__(message)
        self.component = component


class ProtocolError(ScoringError):
    """A remote scorer violated the wire contract."""

    def __init__(
        self,
        message: str,
        *,
        endpoint: str,
        request_id: str | None = None,
        field: str | None = None,
    ):
        super().__init__(message, component=endpoint)
        self.endpoint = endpoint
        self.request_id = request_id
        self.field = field
