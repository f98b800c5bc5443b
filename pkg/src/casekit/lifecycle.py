"""Change tracking between case snapshots and assessment staleness.

There are no calendar-based re-assessment timers here by design: a case is
re-visited when something changed. Changes come from two places, snapshot
diffs (``diff_cases``) and externally raised trigger events (hardware,
software, operating-domain, or use-case shifts). Substantial changes
invalidate the changed claim's assessment and every ancestor's up to the
root; descendants are never touched. Minor changes (an evidence record
getting a newer review, typo-level edits) invalidate nothing and only queue
mechanical re-scoring.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum

from .canon import digest, iso, normalized_ws
from .errors import LifecycleError
from .model import Claim, Evidence, SafetyCase, content_hash, traverse
from .assessment import AssessmentLog


class ChangeKind(str, Enum):
    CLAIM_TEXT = "claim_text"
    TREE_STRUCTURE = "tree_structure"
    EVIDENCE_SET = "evidence_set"
    EVIDENCE_VERSION = "evidence_version"
    SCOPE = "scope"
    NARRATIVE = "narrative"


SUBSTANTIAL = "substantial"
MINOR = "minor"

TRIGGER_KINDS = ("hardware", "software", "odd", "use_case")


@dataclass(frozen=True)
class ChangeItem:
    """One detected difference between two snapshots.

    ``normalized_equal`` is true when the changed texts differ only in
    whitespace; classification treats such edits as typo-level.
    """

    kind: ChangeKind
    location: str
    old_hash: str | None
    new_hash: str | None
    normalized_equal: bool = False


@dataclass(frozen=True)
class ChangeSet:
    old_version: int
    new_version: int
    items: tuple[ChangeItem, ...]

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class TriggerEvent:
    """An externally raised reason to re-visit part of the case."""

    id: str
    kind: str
    description: str
    affected_claims: tuple[str, ...]  # claim ids or family tags
    raised_at: date

    def __post_init__(self):
        object.__setattr__(self, "affected_claims", tuple(self.affected_claims))
        if self.kind not in TRIGGER_KINDS:
            raise LifecycleError(
                f"unknown trigger kind {self.kind!r}; expected one of {TRIGGER_KINDS}",
                code="UNKNOWN_TRIGGER_KIND",
            )


@dataclass(frozen=True)
class WorkItem:
    action: str  # "reassess_claim" | "rescore_evidence"
    target: str
    reason: str


@dataclass(frozen=True)
class StalenessUpdate:
    """Outcome of applying changes and triggers to the assessment log."""

    stale_claims: tuple[str, ...]  # claims whose current assessment was marked
    affected_claims: tuple[str, ...]  # every claim needing (re)assessment, root last
    worklist: tuple[WorkItem, ...]


def diff_cases(old: SafetyCase, new: SafetyCase) -> ChangeSet:
    """Field-level comparison of two snapshots of the same case."""
    items: list[ChangeItem] = []

    def scope_doc(case: SafetyCase) -> dict:
        return {
            "system_description": case.scope.system_description,
            "application": case.scope.application,
            "environment": case.scope.environment,
            "assumptions": list(case.scope.assumptions),
        }

    if old.scope != new.scope:
        items.append(
            ChangeItem(
                kind=ChangeKind.SCOPE,
                location="scope",
                old_hash=digest(scope_doc(old)),
                new_hash=digest(scope_doc(new)),
                normalized_equal=_scope_normalized_equal(old, new),
            )
        )

    old_ids, new_ids = set(old.claims), set(new.claims)
    for cid in sorted(old_ids - new_ids):
        items.append(
            ChangeItem(ChangeKind.TREE_STRUCTURE, cid, content_hash(old.claims[cid]), None)
        )
    for cid in sorted(new_ids - old_ids):
        items.append(
            ChangeItem(ChangeKind.TREE_STRUCTURE, cid, None, content_hash(new.claims[cid]))
        )
    for cid in sorted(old_ids & new_ids):
        a, b = old.claims[cid], new.claims[cid]
        old_h, new_h = content_hash(a), content_hash(b)
        if a.parent != b.parent or a.children != b.children:
            items.append(ChangeItem(ChangeKind.TREE_STRUCTURE, cid, old_h, new_h))
        if a.text != b.text:
            items.append(
                ChangeItem(
                    ChangeKind.CLAIM_TEXT, cid, old_h, new_h,
                    normalized_equal=normalized_ws(a.text) == normalized_ws(b.text),
                )
            )
        if _argument_prose(a) != _argument_prose(b):
            items.append(
                ChangeItem(
                    ChangeKind.NARRATIVE, cid, old_h, new_h,
                    normalized_equal=_argument_prose(a, normalize=True) == _argument_prose(b, normalize=True),
                )
            )

    # per-claim evidence attachment
    for cid in sorted(old_ids & new_ids):
        old_set, new_set = set(old.linked_evidence(cid)), set(new.linked_evidence(cid))
        if old_set != new_set:
            items.append(
                ChangeItem(ChangeKind.EVIDENCE_SET, cid, digest(sorted(old_set)), digest(sorted(new_set)))
            )

    old_ev, new_ev = set(old.evidence), set(new.evidence)
    for ev_id in sorted(old_ev - new_ev):
        items.append(ChangeItem(ChangeKind.EVIDENCE_SET, ev_id, content_hash(old.evidence[ev_id]), None))
    for ev_id in sorted(new_ev - old_ev):
        items.append(ChangeItem(ChangeKind.EVIDENCE_SET, ev_id, None, content_hash(new.evidence[ev_id])))
    for ev_id in sorted(old_ev & new_ev):
        a, b = old.evidence[ev_id], new.evidence[ev_id]
        old_h, new_h = content_hash(a), content_hash(b)
        if old_h != new_h:
            # the artifact itself is different; claims citing it changed footing
            items.append(ChangeItem(ChangeKind.EVIDENCE_SET, ev_id, old_h, new_h))
        elif a != b:
            # same artifact, newer review metadata
            items.append(ChangeItem(ChangeKind.EVIDENCE_VERSION, ev_id, _meta_hash(a), _meta_hash(b)))

    unique = sorted(set(items), key=lambda i: (i.location, i.kind.value))
    return ChangeSet(old_version=old.version, new_version=new.version, items=tuple(unique))


def classify(item: ChangeItem) -> str:
    """``substantial`` changes re-open judgment; ``minor`` ones never do.

    Evidence version bumps are minor by definition. Text and narrative edits
    that survive whitespace normalization unchanged are typo fixes, also
    minor. Everything else (text, structure, evidence sets, scope) is
    substantial.
    """
    if item.kind is ChangeKind.EVIDENCE_VERSION:
        return MINOR
    if item.kind in (ChangeKind.CLAIM_TEXT, ChangeKind.NARRATIVE, ChangeKind.SCOPE) and item.normalized_equal:
        return MINOR
    return SUBSTANTIAL


def mark_stale(
    case: SafetyCase,
    log: AssessmentLog,
    changes: ChangeSet | None = None,
    triggers: tuple[TriggerEvent, ...] = (),
) -> StalenessUpdate:
    """Apply changes and triggers to the assessment log.

    Substantial changes and triggers invalidate the affected claims and their
    ancestor chains, never their descendants. Only claims that currently hold
    an assessment receive a stale mark; the rest simply appear on the
    worklist. The worklist is deduplicated and ordered with the root last so
    leaves are re-judged before the claims that combine them.
    """
    affected: dict[str, str] = {}  # claim id -> first reason
    rescore: dict[str, str] = {}

    def touch(claim_id: str, reason: str) -> None:
        if claim_id not in affected:
            affected[claim_id] = reason
        for ancestor in case.ancestors(claim_id):
            if ancestor not in affected:
                affected[ancestor] = reason

    for item in changes or ():
        if classify(item) == MINOR:
            if item.kind is ChangeKind.EVIDENCE_VERSION and item.location in case.evidence:
                rescore.setdefault(item.location, f"change:{item.kind.value}@{item.location}")
            continue
        reason = f"change:{item.kind.value}@{item.location}"
        if item.kind is ChangeKind.SCOPE:
            touch(case.root_id(), reason)
        elif item.location in case.claims:
            touch(item.location, reason)
        elif item.location in case.evidence:
            for claim_id in new_claims_for_evidence(case, item.location):
                touch(claim_id, reason)
        # locations that vanished with the change (removed claims) are covered
        # by the structural item on their former parent

    for trig in triggers:
        reason = f"trigger:{trig.kind}:{trig.id}"
        for target in trig.affected_claims:
            if target in case.claims:
                touch(target, reason)
                continue
            family_members = [c.id for c in case.claims.values() if c.family == target]
            if not family_members:
                raise LifecycleError(
                    f"trigger {trig.id!r} names unknown claim or family {target!r}",
                    code="UNKNOWN_CLAIM",
                    location=target,
                )
            for claim_id in family_members:
                touch(claim_id, reason)

    current = log.current()
    stale: list[str] = []
    order = {cid: pos for pos, cid in enumerate(traverse(case, "post"))}
    for claim_id in sorted(affected, key=lambda c: order.get(c, -1)):
        if claim_id in current and not current[claim_id].stale:
            log.append_stale_mark(claim_id, affected[claim_id])
            stale.append(claim_id)

    affected_ordered = tuple(sorted(affected, key=lambda c: order.get(c, -1)))
    worklist = tuple(
        WorkItem(action="rescore_evidence", target=ev_id, reason=reason)
        for ev_id, reason in sorted(rescore.items())
    ) + tuple(
        WorkItem(action="reassess_claim", target=claim_id, reason=affected[claim_id])
        for claim_id in affected_ordered
    )
    return StalenessUpdate(stale_claims=tuple(stale), affected_claims=affected_ordered, worklist=worklist)


def new_claims_for_evidence(case: SafetyCase, evidence_id: str) -> tuple[str, ...]:
    return tuple(sorted(set(case.linked_claims(evidence_id))))


def trigger_to_dict(trig: TriggerEvent) -> dict:
    return {
        "id": trig.id,
        "kind": trig.kind,
        "description": trig.description,
        "affected_claims": list(trig.affected_claims),
        "raised_at": trig.raised_at.isoformat(),
    }


def trigger_from_dict(obj: dict) -> TriggerEvent:
    from .canon import parse_date

    required = ("id", "kind", "description", "affected_claims", "raised_at")
    if not isinstance(obj, dict) or any(k not in obj for k in required):
        raise LifecycleError(f"trigger event needs fields {required}", code="BAD_TRIGGER")
    return TriggerEvent(
        id=obj["id"],
        kind=obj["kind"],
        description=obj["description"],
        affected_claims=tuple(obj["affected_claims"]),
        raised_at=parse_date(obj["raised_at"]),
    )


def _meta_hash(ev: Evidence) -> str:
    """Digest over the full record, review metadata included.

    content_hash deliberately ignores review fields, so two records that
    differ only in review status would collide there; this hash tells them
    apart in the change item.
    """
    return digest(
        {
            "id": ev.id,
            "title": ev.title,
            "kind": ev.kind.value,
            "uri": ev.uri,
            "created": iso(ev.created),
            "owner": ev.owner,
            "owner_affiliated": ev.owner_affiliated,
            "last_review": iso(ev.last_review) if ev.last_review else None,
            "active_confirmed": ev.active_confirmed,
            "flagged_major_revision": ev.flagged_major_revision,
            "partially_outdated_flagged": ev.partially_outdated_flagged,
            "revision_history_documented": ev.revision_history_documented,
            "approvals_documented": ev.approvals_documented,
            "controlled_environment": ev.controlled_environment,
            "exists": ev.exists,
        }
    )


def _argument_prose(claim: Claim, normalize: bool = False) -> tuple:
    norm = normalized_ws if normalize else (lambda s: s)
    return (
        norm(claim.justification_narrative),
        tuple(sorted((norm(ca.text), norm(ca.rejection), ca.rejection_evidence) for ca in claim.counter_arguments)),
        tuple(sorted(norm(l) for l in claim.limitations)),
    )


def _scope_normalized_equal(old: SafetyCase, new: SafetyCase) -> bool:
    a, b = old.scope, new.scope
    return (
        normalized_ws(a.system_description) == normalized_ws(b.system_description)
        and normalized_ws(a.application) == normalized_ws(b.application)
        and normalized_ws(a.environment) == normalized_ws(b.environment)
        and tuple(normalized_ws(x) for x in a.assumptions) == tuple(normalized_ws(x) for x in b.assumptions)
    )
