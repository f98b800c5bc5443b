"""Canonical encoding helpers shared by hashing, file formats, and logs."""
from __future__ import annotations

import hashlib
import json
from datetime import date


def canonical_json(value: object) -> str:
    """Compact canonical JSON: sorted keys, no insignificant whitespace."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_json_pretty(value: object) -> str:
    """Indented canonical JSON used for on-disk documents. Newline-terminated."""
    return json.dumps(value, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(value: object) -> str:
    """Hex sha256 of the compact canonical encoding of ``value``."""
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


def iso(d: date | None) -> str | None:
    return None if d is None else d.isoformat()


def parse_date(text: str) -> date:
    """Parse a strict ISO-8601 calendar date (YYYY-MM-DD)."""
    return date.fromisoformat(text)


def months_between(start: date, end: date) -> int:
    """Whole calendar months elapsed from ``start`` to ``end``.

    Counts a month only once the day-of-month has been reached, so
    2026-01-15 -> 2026-02-14 is 0 months and 2026-01-15 -> 2026-02-15 is 1.
    Negative when ``end`` precedes ``start`` by at least one such month.
    """
    months = (end.year - start.year) * 12 + (end.month - start.month)
    if end.day < start.day:
        months -= 1
    return months


def normalized_ws(text: str | None) -> str:
    """Collapse runs of whitespace; used to tell typo-level edits apart."""
    if text is None:
        return ""
    return " ".join(text.split())
