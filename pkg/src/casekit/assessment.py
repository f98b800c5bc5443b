"""Human claim assessment: the two-dimension rubric, records, and the log.

Each claim is judged on two dimensions. The procedural dimension asks whether
the supporting processes and their governance are documented; the
implementation dimension asks whether there is evidence the processes were
carried out and produced supporting results. Either dimension may be marked
not-applicable with a written justification, for example a claim that only
asserts the existence of a policy. A not-applicable dimension contributes
nothing to roll-ups; it is neither a 0 nor a free 3.

Assessments are recorded in an append-only log. A newer record for the same
claim supersedes the older one; nothing is ever rewritten in place.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path

from .canon import canonical_json, iso, parse_date
from .errors import AssessmentError
from .model import SafetyCase

PROCEDURAL = "procedural"
IMPLEMENTATION = "implementation"
DIMENSIONS = (PROCEDURAL, IMPLEMENTATION)

LEVEL_TITLES = {
    0: "Insufficient Support",
    1: "Initial Support",
    2: "Adequate Support",
    3: "Strong Support",
}

_PROCEDURAL_GUIDANCE = {
    0: (
        "Documentation on processes/ procedures has not been provided for any aspects of claim.\n\n"
        "[Procedural evidence may not have been provided, or may be irrelevant to the satisfaction "
        "of the claim.]\n\n"
        "No governance or oversight has been provided for any meaningful aspect of the claim."
    ),
    1: (
        "Documentation on processes/procedures has only been provided for certain portions of the "
        "claim and/or is inapplicable to critical aspects of the claim.\n\n"
        "Little or no oversight of processes/procedures has been provided for critical aspects of "
        "the claim (for example: reliance on individual or small teams efforts for process design "
        "without an approved policy or design document)."
    ),
    2: (
        "Documentation on processes/procedures addresses core aspects of the claim, but may "
        "necessitate further clarity or detail.\n\n"
        "Oversight and governance is established, with design aspects and/or procedural decisions "
        "under the oversight of key stakeholders at Director level or higher (or clearly defined "
        "delegate)."
    ),
    3: (
        "Clear and complete documentation on processes/procedures is sufficient and is directly "
        "applicable to all aspects of the claim.\n\n"
        "Oversight and governance is established, with design aspects and/or procedural decisions "
        "clearly aligned with broader company programs and goals (e.g., codified in company-level "
        "Objectives and Key Results (OKRs) or Product Requirement Documents (PRDs)."
    ),
}

_IMPLEMENTATION_GUIDANCE = {
    0: (
        "Evidence of implementing any parts of the processes/ procedures above has not been "
        "provided.\n\n"
        "When a process is not specified or required*, evidence of results or metrics relevant for "
        "any aspects of the claim is not available.\n\n"
        "[Implementation evidence may not be attached, or may be irrelevant to the satisfaction of "
        "the claim.]"
    ),
    1: (
        "Evidence of implementation of processes/procedures is sufficient for some, but not all "
        "critical aspects of the claim [it may not have been provided or may be irrelevant].\n\n"
        "Process implementation is ad-hoc, dependent on individual effort, and/or not consistent "
        "with documentation provided.\n\n"
        "When a process is not specified or required*, execution metrics and/or overall results may "
        "not support critical aspects of the claim."
    ),
    2: (
        "Evidence of implementation of processes/procedures addresses core aspects of the claim, "
        "with applicable metrics and results that adequately support the claim.\n\n"
        "Process implementation may demonstrate minor inconsistencies or known departures that are "
        "not always documented. When a process is not specified or required*, execution metrics "
        "and/or overall results still address core aspects of the claim."
    ),
    3: (
        "Evidence of implementation consistently and appropriately follows processes/procedures "
        "documentation, covering all aspects of the claim. Uniform tracking of non-conformities is "
        "available and well documented.\n\n"
        "Process implementation demonstrates a deliberate allocation of resources to focus on "
        "process optimization & improvement. Applicable metrics are aligned to company goals with "
        "tracked progress and trends toward continual improvement."
    ),
}

# The star in the cell texts refers to this note: a dimension can be
# inapplicable for a given claim, and the assessor records that explicitly.
DIMENSION_NOTES = {
    PROCEDURAL: (
        "Some claims may not require documentation of procedures, e.g., claims arguing the "
        "existence of required documentation artifacts; the procedural dimension may then be "
        "marked not applicable with a justification."
    ),
    IMPLEMENTATION: (
        "Some claims may not require implementation evidence, e.g., claims which state the "
        "existence of policy or process documentation; the implementation dimension may then be "
        "marked not applicable with a justification."
    ),
}


@dataclass(frozen=True)
class RubricCell:
    dimension: str
    level: int
    title: str
    guidance: str


def rubric_text(dimension: str, level: int) -> RubricCell:
    """The exact rubric cell an assessor sees for a dimension and level."""
    if dimension not in DIMENSIONS:
        raise AssessmentError(f"unknown dimension {dimension!r}", code="UNKNOWN_DIMENSION", field="dimension")
    if level not in LEVEL_TITLES:
        raise AssessmentError(f"level must be 0..3, got {level!r}", code="BAD_LEVEL", field="level")
    guidance = (_PROCEDURAL_GUIDANCE if dimension == PROCEDURAL else _IMPLEMENTATION_GUIDANCE)[level]
    return RubricCell(dimension=dimension, level=level, title=LEVEL_TITLES[level], guidance=guidance)


def rubric_table() -> dict[str, dict[int, RubricCell]]:
    """All eight cells, keyed by dimension then level."""
    return {dim: {level: rubric_text(dim, level) for level in range(4)} for dim in DIMENSIONS}


def assessment_prompts(case: SafetyCase, claim_id: str) -> tuple[str, ...]:
    """Ordered checklist shown to an assessor before scoring a claim.

    The three attribute prompts always appear; the consistency question is
    added only when the claim links at least two pieces of evidence, and the
    conservativeness reminder only when the claim has child claims.
    """
    if claim_id not in case.claims:
        raise AssessmentError(f"unknown claim {claim_id!r}", code="UNKNOWN_CLAIM", location=claim_id)
    claim = case.claims[claim_id]
    prompts = [
        "Coverage: how much of the claim do the provided artifacts address - no aspects, "
        "critical aspects, core aspects, or all aspects?",
        "Relevance: is each attached artifact actually applicable to this claim, or is it "
        "extraneous or tangential to what the claim asserts?",
        "Governance: what level of oversight stands behind the process design and its "
        "execution, and is that oversight aligned with broader organizational goals?",
    ]
    if len(case.linked_evidence(claim_id)) >= 2:
        prompts.append(
            "Consistency: are the findings from the different pieces of evidence consistent "
            "and mutually supporting, or are there discrepancies or contradictions that weaken "
            "the overall argument?"
        )
    if claim.children:
        prompts.append(
            "Conservativeness: weigh how each child claim's assessment contributes to this "
            "claim's score; a strong child cannot paper over a weak one that carries more of "
            "the argument."
        )
    return tuple(prompts)


# ---------------------------------------------------------------------------
# assessment records


@dataclass(frozen=True)
class ClaimAssessment:
    """One recorded judgment of one claim at a pinned case version."""

    claim_id: str
    summary: str
    assessor: tuple[str, ...]
    assessed_at: date
    case_version: int
    procedural: int | None = None
    implementation: int | None = None
    procedural_na: bool = False
    implementation_na: bool = False
    na_justification: str | None = None
    stale: bool = False

    def __post_init__(self):
        if isinstance(self.assessor, str):
            object.__setattr__(self, "assessor", (self.assessor,))
        else:
            object.__setattr__(self, "assessor", tuple(self.assessor))

    def score(self, dimension: str) -> int | None:
        return self.procedural if dimension == PROCEDURAL else self.implementation

    def is_na(self, dimension: str) -> bool:
        return self.procedural_na if dimension == PROCEDURAL else self.implementation_na


def validate_assessment(rec: ClaimAssessment) -> None:
    """Raise AssessmentError naming the offending field on the first problem."""

    def fail(field: str, message: str):
        raise AssessmentError(message, code="INVARIANT_VIOLATION", field=field, location=rec.claim_id)

    for dim in DIMENSIONS:
        score, na = rec.score(dim), rec.is_na(dim)
        if na and score is not None:
            fail(dim, f"{dim} cannot carry both a score and a not-applicable mark")
        if not na and score is None:
            fail(dim, f"{dim} needs a score or an explicit not-applicable mark")
        if score is not None and (not isinstance(score, int) or isinstance(score, bool) or not 0 <= score <= 3):
            fail(dim, f"{dim} score must be an integer in 0..3, got {score!r}")
    if (rec.procedural_na or rec.implementation_na) and not (rec.na_justification or "").strip():
        fail("na_justification", "a not-applicable mark requires a written justification")
    if not rec.summary.strip():
        fail("summary", "summary must be non-empty")
    if not rec.assessor or not all(name.strip() for name in rec.assessor):
        fail("assessor", "at least one named assessor is required")


def assessment_to_dict(rec: ClaimAssessment) -> dict:
    return {
        "claim_id": rec.claim_id,
        "summary": rec.summary,
        "assessor": list(rec.assessor),
        "assessed_at": iso(rec.assessed_at),
        "case_version": rec.case_version,
        "procedural": rec.procedural,
        "implementation": rec.implementation,
        "procedural_na": rec.procedural_na,
        "implementation_na": rec.implementation_na,
        "na_justification": rec.na_justification,
        "stale": rec.stale,
    }


def assessment_from_dict(obj: dict) -> ClaimAssessment:
    def fail(field: str, message: str):
        raise AssessmentError(message, code="INVARIANT_VIOLATION", field=field)

    known = {
        "claim_id", "summary", "assessor", "assessed_at", "case_version", "procedural",
        "implementation", "procedural_na", "implementation_na", "na_justification", "stale",
    }
    if not isinstance(obj, dict):
        fail("$", "assessment record must be an object")
    unknown = sorted(set(obj) - known)
    if unknown:
        fail(unknown[0], "unknown assessment field")
    for required in ("claim_id", "summary", "assessor", "assessed_at", "case_version"):
        if required not in obj:
            fail(required, "missing assessment field")
    assessor = obj["assessor"]
    if isinstance(assessor, str):
        assessor = (assessor,)
    elif isinstance(assessor, list) and all(isinstance(a, str) for a in assessor):
        assessor = tuple(assessor)
    else:
        fail("assessor", "assessor must be a name or a list of names")
    try:
        assessed_at = parse_date(obj["assessed_at"])
    except (TypeError, ValueError):
        fail("assessed_at", f"expected an ISO-8601 date, got {obj['assessed_at']!r}")
    return ClaimAssessment(
        claim_id=obj["claim_id"],
        summary=obj["summary"],
        assessor=assessor,
        assessed_at=assessed_at,
        case_version=obj["case_version"],
        procedural=obj.get("procedural"),
        implementation=obj.get("implementation"),
        procedural_na=bool(obj.get("procedural_na", False)),
        implementation_na=bool(obj.get("implementation_na", False)),
        na_justification=obj.get("na_justification"),
        stale=bool(obj.get("stale", False)),
    )


# ---------------------------------------------------------------------------
# append-only log


class AssessmentLog:
    """Append-only event log backed by an optional JSON-lines file.

    Two event kinds exist: ``assessment`` (a recorded judgment) and
    ``stale_mark`` (a change or trigger invalidated the current judgment of a
    claim). The current view is derived, never stored: the latest assessment
    per claim, with staleness applied when a mark postdates it.
    """

    def __init__(self, path: str | Path | None = None, events: list[dict] | None = None):
        self.path = Path(path) if path is not None else None
        self._events: list[dict] = list(events or [])
        self._lock = threading.Lock()

    @classmethod
    def load(cls, path: str | Path) -> "AssessmentLog":
        path = Path(path)
        events = []
        if path.exists():
            for i, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise AssessmentError(
                        f"corrupt log line {i + 1}: {exc.msg}", code="CORRUPT_LOG", location=str(path)
                    ) from exc
                # this tool is the only writer, so an unrecognized line is a
                # foreign file (raw records, say), not a future event kind
                if not isinstance(event, dict) or event.get("event") not in ("assessment", "stale_mark"):
                    raise AssessmentError(
                        f"corrupt log line {i + 1}: not a log event", code="CORRUPT_LOG", location=str(path)
                    )
                events.append(event)
        return cls(path=path, events=events)

    def __len__(self) -> int:
        return len(self._events)

    @property
    def events(self) -> tuple[dict, ...]:
        return tuple(self._events)

    def append_assessment(self, rec: ClaimAssessment) -> None:
        self._append({"event": "assessment", "record": assessment_to_dict(rec)})

    def append_stale_mark(self, claim_id: str, reason: str) -> None:
        self._append({"event": "stale_mark", "claim_id": claim_id, "reason": reason})

    def _append(self, event: dict) -> None:
        with self._lock:
            self._events.append(event)
            if self.path is not None:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(canonical_json(event) + "\n")

    def current(self) -> dict[str, ClaimAssessment]:
        """Latest non-superseded assessment per claim, staleness applied."""
        latest: dict[str, tuple[int, ClaimAssessment]] = {}
        marks: dict[str, int] = {}
        for pos, event in enumerate(self._events):
            if event.get("event") == "assessment":
                rec = assessment_from_dict(event["record"])
                latest[rec.claim_id] = (pos, rec)
            elif event.get("event") == "stale_mark":
                marks[event["claim_id"]] = pos
        out = {}
        for claim_id, (pos, rec) in latest.items():
            stale = marks.get(claim_id, -1) > pos
            out[claim_id] = replace(rec, stale=stale) if stale != rec.stale else rec
        return out

    def history(self, claim_id: str) -> tuple[ClaimAssessment, ...]:
        return tuple(
            assessment_from_dict(e["record"])
            for e in self._events
            if e.get("event") == "assessment" and e["record"]["claim_id"] == claim_id
        )


def record_assessment(case: SafetyCase, log: AssessmentLog, rec: ClaimAssessment) -> ClaimAssessment:
    """Validate and append one assessment; returns the stored record.

    Rejects unknown claims, records pinned to a stale case version,
    self-assessment by the claim's point of contact, and records that break
    the score/not-applicable invariants. Appending supersedes any earlier
    assessment of the same claim and clears its staleness.
    """
    if rec.claim_id not in case.claims:
        raise AssessmentError(f"unknown claim {rec.claim_id!r}", code="UNKNOWN_CLAIM", location=rec.claim_id)
    if rec.case_version != case.version:
        raise AssessmentError(
            f"record pins case version {rec.case_version}, current is {case.version}",
            code="STALE_VERSION",
            location=rec.claim_id,
            field="case_version",
        )
    validate_assessment(rec)
    poc = case.claims[rec.claim_id].poc
    if poc is not None and poc in rec.assessor:
        raise AssessmentError(
            f"claim {rec.claim_id!r} cannot be assessed by its own point of contact ({poc})",
            code="SELF_ASSESSMENT",
            location=rec.claim_id,
            field="assessor",
        )
    stored = replace(rec, stale=False) if rec.stale else rec
    log.append_assessment(stored)
    return stored
