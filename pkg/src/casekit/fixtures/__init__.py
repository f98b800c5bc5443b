"""Bundled demo case: a worked example shaped like a real review package."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture file."""
    return Path(str(resources.files(__package__) / name))


def demo_case_bytes() -> bytes:
    return fixture_path("demo.case.json").read_bytes()


def demo_assessments() -> list[dict]:
    return json.loads(fixture_path("demo_assessments.json").read_text(encoding="utf-8"))


def demo_actions() -> list[dict]:
    return json.loads(fixture_path("demo_actions.json").read_text(encoding="utf-8"))
