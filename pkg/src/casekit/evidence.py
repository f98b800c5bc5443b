"""Mechanical evidence-status scoring.

Scores each library record on the 0-3 status scale from its review metadata
alone, with no human judgment involved. The rule set is an ordered cascade,
first match wins, and degradation rules sit ahead of promotion rules so a
record that is both stale and well-governed still degrades. When no rule
matches, the score falls back to 1, never to a silent pass.

This scoring is deliberately independent of claim assessment: re-assessing a
claim can never move an evidence status score.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from .canon import months_between
from .errors import ScoringError
from .model import Evidence, SafetyCase

RULE_MISSING = "R0"
RULE_FLAGGED = "R1a"
RULE_STALE = "R1b"
RULE_OWNERSHIP = "R1c"
RULE_EXCEEDS = "R3"
RULE_MEETS = "R2"
RULE_FALLBACK = "R_fallback"

FRESH_MONTHS = 6  # strictly less than this is "fresh"
STALE_MONTHS = 12  # at least this with no reconfirmation is "stale"


@dataclass(frozen=True)
class EvidenceStatusScore:
    evidence_id: str
    score: int
    rule_trace: tuple[str, ...]
    as_of: date


@dataclass(frozen=True)
class EvidenceHygieneReport:
    """Library-wide scoring summary for one reference date."""

    as_of: date
    case_version: int
    scores: tuple[EvidenceStatusScore, ...]
    counts: dict[int, int]
    threshold: int
    below_threshold: tuple[str, ...]


def score_evidence(ev: Evidence, as_of: date) -> EvidenceStatusScore:
    """Score one record as of a reference date.

    Age counts whole calendar months since the last review; a record that was
    never reviewed ages from its creation date and cannot count as actively
    confirmed. Boundaries are strict: exactly six months old is no longer
    fresh, and twelve or more months without reconfirmation is stale.
    """
    if ev.exists and as_of < ev.created:
        raise ScoringError(
            f"as_of {as_of.isoformat()} predates created {ev.created.isoformat()}",
            code="AS_OF_BEFORE_CREATED",
            location=ev.id,
        )

    def hit(rule: str, score: int) -> EvidenceStatusScore:
        return EvidenceStatusScore(evidence_id=ev.id, score=score, rule_trace=(rule,), as_of=as_of)

    if not ev.exists:
        return hit(RULE_MISSING, 0)

    reviewed = ev.last_review is not None
    reference = ev.last_review if reviewed else ev.created
    age = months_between(reference, as_of)
    active = ev.active_confirmed if reviewed else False
    owner_ok = ev.owner is not None and ev.owner_affiliated

    if ev.flagged_major_revision:
        return hit(RULE_FLAGGED, 1)
    if age >= STALE_MONTHS and not active:
        return hit(RULE_STALE, 1)
    if not owner_ok:
        return hit(RULE_OWNERSHIP, 1)
    if (
        age < FRESH_MONTHS
        and ev.revision_history_documented
        and ev.approvals_documented
        and ev.controlled_environment
    ):
        return hit(RULE_EXCEEDS, 3)
    if age < STALE_MONTHS and (active or reviewed):
        # partially outdated elements are permitted here as long as flagged
        return hit(RULE_MEETS, 2)
    return hit(RULE_FALLBACK, 1)


def score_library(case: SafetyCase, as_of: date, threshold: int = 2) -> EvidenceHygieneReport:
    """Score every record in the library, linked or not."""
    scores = tuple(score_evidence(ev, as_of) for _, ev in sorted(case.evidence.items()))
    counts = {level: 0 for level in range(4)}
    for s in scores:
        counts[s.score] += 1
    return EvidenceHygieneReport(
        as_of=as_of,
        case_version=case.version,
        scores=scores,
        counts=counts,
        threshold=threshold,
        below_threshold=tuple(s.evidence_id for s in scores if s.score < threshold),
    )
