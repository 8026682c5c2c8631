"""Engine error hierarchy.

Every error carries a stable ``code`` string that is part of the API
surface: the HTTP service maps codes onto status classes and the CLI
maps them onto exit code 1 (validation) vs 2 (internal).
"""

from __future__ import annotations


class DqError(Exception):
    """Base class for all engine errors."""

    code = "internal_error"
    http_status = 500

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}

    def to_payload(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


class InvalidInput(DqError):
    code = "validation_error"
    http_status = 400


class IngestError(DqError):
    code = "ingest_error"
    http_status = 400


class UnknownColumn(DqError):
    code = "unknown_column"
    http_status = 400


class UnknownSession(DqError):
    code = "unknown_session"
    http_status = 404


class UnknownSnapshot(DqError):
    code = "unknown_snapshot"
    http_status = 404


class StaleSnapshot(DqError):
    code = "stale_snapshot"
    http_status = 409


class InvalidSpec(DqError):
    code = "invalid_spec"
    http_status = 400


class InvalidRule(DqError):
    code = "invalid_rule"
    http_status = 400


class EmptyResultRefused(DqError):
    code = "empty_result_refused"
    http_status = 400


class LabelProtected(DqError):
    code = "label_protected"
    http_status = 400


class DegenerateInput(DqError):
    code = "degenerate_input"
    http_status = 400


class SingularDesign(DqError):
    code = "singular_design"
    http_status = 400


class PayloadTooLarge(DqError):
    code = "payload_too_large"
    http_status = 400


class SessionFileError(DqError):
    code = "session_file_error"
    http_status = 400


class VersionMismatch(DqError):
    code = "version_mismatch"
    http_status = 400
