"""Error types. Every raised error carries a stable machine-readable code."""
from __future__ import annotations


class CaseKitError(Exception):
    """Base class; ``code`` is stable across releases, ``location`` optional."""

    def __init__(self, message: str, *, code: str, location: str | None = None):
        super().__init__(message)
        self.code = code
        self.location = location

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        base = super().__str__()
        if self.location:
            return f"{self.code} at {self.location}: {base}"
        return f"{self.code}: {base}"


class ModelError(CaseKitError):
    """Raised when a case value cannot be represented at all (for example
    duplicate ids in a claim table). Recoverable shape problems are reported
    as validation violations instead of being raised."""


class ParseError(CaseKitError):
    """Canonical-document parse failure with a located cause."""

    def __init__(
        self,
        message: str,
        *,
        code: str,
        location: str | None = None,
        line: int | None = None,
        column: int | None = None,
        violations: tuple = (),
    ):
        super().__init__(message, code=code, location=location)
        self.line = line
        self.column = column
        self.violations = violations


class TabularError(CaseKitError):
    """Tabular import/export failure (bad header, malformed cell, bad ids)."""

    def __init__(self, message: str, *, code: str, location: str | None = None, violations: tuple = ()):
        super().__init__(message, code=code, location=location)
        self.violations = violations


class ScoringError(CaseKitError):
    """Bad input to the evidence status scorer (for example as_of before created)."""


class AssessmentError(CaseKitError):
    """Rejected claim assessment; ``field`` names the offending record field."""

    def __init__(self, message: str, *, code: str, location: str | None = None, field: str | None = None):
        super().__init__(message, code=code, location=location)
        self.field = field


class RollupError(CaseKitError):
    """Bad roll-up configuration (unknown strategy, bad weights or overrides)."""


class LifecycleError(CaseKitError):
    """Bad change-tracking input (for example a trigger naming unknown claims)."""


class ReportError(CaseKitError):
    """Report assembly or rendering failure."""
