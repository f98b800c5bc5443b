"""Advisory hygiene checks over a case.

Lint findings never block any pipeline stage; they exist to be read. Severity
is advisory too: ``error`` means the argument has a hole a reviewer must not
overlook, ``warning`` flags probable drafting problems, ``info`` points at
things worth a look.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .model import EvidenceKind, SafetyCase
from .assessment import IMPLEMENTATION, PROCEDURAL, ClaimAssessment

SEV_ERROR = "error"
SEV_WARNING = "warning"
SEV_INFO = "info"

RULES: dict[str, tuple[str, str]] = {
    "L-OVERSTATE": (SEV_WARNING, "claim text contains a standalone universal quantifier"),
    "L-UNDEVELOPED": (SEV_ERROR, "claim has neither children nor linked evidence"),
    "L-ORPHAN-EVIDENCE": (SEV_INFO, "evidence record is linked to no claim"),
    "L-NO-REJECTION": (SEV_ERROR, "counter-argument lacks a rejection"),
    "L-NO-NARRATIVE": (SEV_WARNING, "parent claim lacks a justification narrative"),
    "L-DUP-LINK": (SEV_WARNING, "evidence is linked to a claim and to one of its ancestors"),
    "L-NO-POC": (SEV_WARNING, "claim has no point of contact"),
    "L-KIND-GAP": (SEV_INFO, "linked evidence is all of one kind and the gap is not marked not-applicable"),
}

# standalone quantifier tokens; hyphenated compounds like "all-weather" are
# single tokens and therefore never match
_QUANTIFIERS = frozenset({"all", "any", "every"})
_TOKEN = re.compile(r"[A-Za-z0-9]+(?:[-'][A-Za-z0-9]+)*")


@dataclass(frozen=True)
class LintFinding:
    rule: str
    severity: str
    location: str
    message: str


def overstated_tokens(text: str) -> tuple[str, ...]:
    """The standalone universal quantifiers appearing in ``text``, in order."""
    return tuple(tok for tok in _TOKEN.findall(text) if tok.lower() in _QUANTIFIERS)


def lint_case(
    case: SafetyCase, assessments: Mapping[str, ClaimAssessment] | None = None
) -> tuple[LintFinding, ...]:
    """Run every registered rule; findings are ordered by location then rule.

    The evidence-kind gap rule needs to see assessments (it checks for a
    matching not-applicable mark); when ``assessments`` is None that rule is
    skipped entirely.
    """
    findings: list[LintFinding] = []

    def add(rule: str, location: str, message: str) -> None:
        findings.append(LintFinding(rule=rule, severity=RULES[rule][0], location=location, message=message))

    linked_by_claim: dict[str, list[str]] = {}
    linked_by_evidence: dict[str, list[str]] = {}
    for link in case.links:
        linked_by_claim.setdefault(link.claim_id, []).append(link.evidence_id)
        linked_by_evidence.setdefault(link.evidence_id, []).append(link.claim_id)

    for claim in case.claims.values():
        tokens = overstated_tokens(claim.text)
        if tokens:
            add(
                "L-OVERSTATE",
                claim.id,
                f"claim text uses {', '.join(sorted(set(t.lower() for t in tokens)))!s} as a standalone quantifier",
            )
        if not claim.children and not linked_by_claim.get(claim.id):
            add("L-UNDEVELOPED", claim.id, "claim is undeveloped: no child claims and no linked evidence")
        for ca in claim.counter_arguments:
            if not (ca.rejection or "").strip():
                add("L-NO-REJECTION", claim.id, f"counter-argument {ca.text[:60]!r} has no rejection")
        if claim.children and not (claim.justification_narrative or "").strip():
            add("L-NO-NARRATIVE", claim.id, "claim with children has no justification narrative")
        if claim.poc is None:
            add("L-NO-POC", claim.id, "claim names no point of contact")

        ancestors = set(case.ancestors(claim.id)) if claim.id in case.claims else set()
        for ev_id in linked_by_claim.get(claim.id, ()):
            shared = sorted(a for a in linked_by_evidence.get(ev_id, ()) if a in ancestors)
            if shared:
                add(
                    "L-DUP-LINK",
                    claim.id,
                    f"evidence {ev_id} is also linked to ancestor {shared[0]}",
                )

        if assessments is not None:
            ev_ids = linked_by_claim.get(claim.id, ())
            if ev_ids:
                kinds = {case.evidence[e].kind for e in ev_ids if e in case.evidence}
                if kinds == {EvidenceKind.PROCEDURAL}:
                    gap_dim, gap_flag = IMPLEMENTATION, "implementation_na"
                elif kinds == {EvidenceKind.IMPLEMENTATION}:
                    gap_dim, gap_flag = PROCEDURAL, "procedural_na"
                else:
                    gap_dim = None
                if gap_dim is not None:
                    rec = assessments.get(claim.id)
                    if rec is None or not rec.is_na(gap_dim):
                        add(
                            "L-KIND-GAP",
                            claim.id,
                            f"linked evidence is all {next(iter(kinds)).value}; no {gap_flag} mark on the assessment",
                        )

    for ev in case.evidence.values():
        if ev.id not in linked_by_evidence:
            add("L-ORPHAN-EVIDENCE", ev.id, "evidence record is not linked to any claim")

    findings.sort(key=lambda f: (f.location, f.rule))
    return tuple(findings)
