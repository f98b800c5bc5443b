"""Core case model: scope front matter, claim tree, evidence library, links.

Values are immutable snapshots. Structural business rules are not enforced at
construction time; they are reported as data by :func:`validate_case` so a
partially built or imported case can be inspected rather than rejected
wholesale. Construction only refuses values that cannot be represented at all
(duplicate ids keyed into a table, malformed enum literals).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date
from enum import Enum
from typing import Iterator, Mapping

from .canon import digest
from .errors import ModelError


class ClaimStatus(str, Enum):
    """Authoring lifecycle stage of a claim."""

    DRAFTED = "drafted"
    EVIDENCE_COLLECTED = "evidence_collected"
    NARRATED = "narrated"
    ASSESSED = "assessed"


class EvidenceKind(str, Enum):
    PROCEDURAL = "procedural"
    IMPLEMENTATION = "implementation"


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class CaseScope:
    """Front matter: what system, for what application, in what environment."""

    system_description: str
    application: str
    environment: str
    assumptions: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "assumptions", tuple(self.assumptions))


@dataclass(frozen=True)
class CounterArgument:
    """A recorded defeater plus the rationale for discounting it."""

    text: str
    rejection: str | None = None
    rejection_evidence: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rejection_evidence", tuple(self.rejection_evidence))


@dataclass(frozen=True)
class Claim:
    """One node of the argument tree.

    ``children`` order is meaningful (document order) and preserved.
    ``limitations`` and ``counter_arguments`` are unordered sets by intent and
    are normalized into a digest-sorted canonical order on construction.
    """

    id: str
    text: str
    parent: str | None = None
    children: tuple[str, ...] = ()
    family: str | None = None
    poc: str | None = None
    counter_arguments: tuple[CounterArgument, ...] = ()
    limitations: tuple[str, ...] = ()
    justification_narrative: str | None = None
    status: ClaimStatus = ClaimStatus.DRAFTED

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(
            self,
            "limitations",
            tuple(sorted(self.limitations, key=digest)),
        )
        object.__setattr__(
            self,
            "counter_arguments",
            tuple(sorted(self.counter_arguments, key=_counter_argument_key)),
        )
        if not isinstance(self.status, ClaimStatus):
            object.__setattr__(self, "status", ClaimStatus(self.status))


def _counter_argument_key(ca: CounterArgument) -> str:
    return digest(
        {
            "text": ca.text,
            "rejection": ca.rejection,
            "rejection_evidence": list(ca.rejection_evidence),
        }
    )


@dataclass(frozen=True)
class Evidence:
    """A library entry describing one artifact and its review status.

    The review-status booleans feed the mechanical hygiene scorer; none of
    them participate in the record's semantic content hash.
    """

    id: str
    title: str
    kind: EvidenceKind
    uri: str
    created: date
    owner: str | None = None
    owner_affiliated: bool = False
    last_review: date | None = None
    active_confirmed: bool = False
    flagged_major_revision: bool = False
    partially_outdated_flagged: bool = False
    revision_history_documented: bool = False
    approvals_documented: bool = False
    controlled_environment: bool = False
    exists: bool = True

    def __post_init__(self):
        if not isinstance(self.kind, EvidenceKind):
            object.__setattr__(self, "kind", EvidenceKind(self.kind))


@dataclass(frozen=True)
class EvidenceLink:
    claim_id: str
    evidence_id: str
    note: str | None = None


@dataclass(frozen=True)
class SafetyCase:
    """Immutable case snapshot. Mutations produce a new, version-bumped copy."""

    scope: CaseScope
    claims: Mapping[str, Claim]
    evidence: Mapping[str, Evidence]
    links: tuple[EvidenceLink, ...] = ()
    version: int = 1

    def __post_init__(self):
        object.__setattr__(self, "claims", _keyed(self.claims, "claim"))
        object.__setattr__(self, "evidence", _keyed(self.evidence, "evidence"))
        object.__setattr__(
            self,
            "links",
            tuple(sorted(self.links, key=lambda l: (l.claim_id, l.evidence_id, l.note or ""))),
        )

    # -- derived views ------------------------------------------------------

    @property
    def canonical_hash(self) -> str:
        from .formats import case_document  # deferred: formats imports model

        return digest(case_document(self))

    def root_id(self) -> str:
        roots = [c.id for c in self.claims.values() if c.parent is None]
        if len(roots) != 1:
            raise ModelError(
                f"expected exactly one root claim, found {len(roots)}",
                code="NO_ROOT" if not roots else "MULTIPLE_ROOTS",
            )
        return roots[0]

    def linked_evidence(self, claim_id: str) -> tuple[str, ...]:
        return tuple(l.evidence_id for l in self.links if l.claim_id == claim_id)

    def linked_claims(self, evidence_id: str) -> tuple[str, ...]:
        return tuple(l.claim_id for l in self.links if l.evidence_id == evidence_id)

    def ancestors(self, claim_id: str) -> tuple[str, ...]:
        """Parent chain from ``claim_id`` (exclusive) up to the root."""
        chain: list[str] = []
        seen = {claim_id}
        cur = self.claims[claim_id].parent
        while cur is not None:
            if cur in seen or cur not in self.claims:
                break  # cyclic or dangling; validate_case reports it
            chain.append(cur)
            seen.add(cur)
            cur = self.claims[cur].parent
        return tuple(chain)

    # -- mutation helpers ----------------------------------------------------

    def bump(self, **changes) -> "SafetyCase":
        """Return a copy with ``changes`` applied and the version incremented."""
        changes.setdefault("version", self.version + 1)
        return replace(self, **changes)

    def with_claim(self, claim: Claim) -> "SafetyCase":
        claims = dict(self.claims)
        claims[claim.id] = claim
        return self.bump(claims=claims)

    def with_evidence(self, ev: Evidence) -> "SafetyCase":
        evidence = dict(self.evidence)
        evidence[ev.id] = ev
        return self.bump(evidence=evidence)


def _keyed(items, what: str) -> dict:
    if isinstance(items, Mapping):
        pairs = list(items.items())
    else:
        pairs = [(item.id, item) for item in items]
    table: dict = {}
    for key, item in pairs:
        if key != item.id:
            raise ModelError(f"{what} keyed as {key!r} but carries id {item.id!r}", code="KEY_MISMATCH")
        if key in table:
            raise ModelError(f"duplicate {what} id {key!r}", code="DUPLICATE_ID", location=key)
        table[key] = item
    return table


# ---------------------------------------------------------------------------
# content hashing


def content_hash(item: Claim | Evidence) -> str:
    """Digest of an item's semantic content.

    Claim hashes cover the argument itself: text, child ids in order, the
    normalized counter-argument and limitation sets, and the narrative.
    Evidence hashes cover only what the artifact is (title, kind, uri); review
    status and ownership churn never change an item's identity.
    """
    if isinstance(item, Claim):
        return digest(
            {
                "t": "claim",
                "text": item.text,
                "children": list(item.children),
                "counter_arguments": [
                    {
                        "text": ca.text,
                        "rejection": ca.rejection,
                        "rejection_evidence": list(ca.rejection_evidence),
                    }
                    for ca in item.counter_arguments
                ],
                "limitations": list(item.limitations),
                "narrative": item.justification_narrative,
            }
        )
    if isinstance(item, Evidence):
        return digest({"t": "evidence", "title": item.title, "kind": item.kind.value, "uri": item.uri})
    raise TypeError(f"content_hash: unsupported type {type(item).__name__}")


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.violations)


def validate_case(case: SafetyCase) -> ValidationReport:
    """Check every structural invariant; returns an empty report iff all hold."""
    out: list[Violation] = []

    def bad(code: str, location: str, message: str) -> None:
        out.append(Violation(code, location, message))

    for name in ("system_description", "application", "environment"):
        if not getattr(case.scope, name).strip():
            bad("EMPTY_SCOPE_FIELD", f"scope.{name}", "scope field must be non-empty")

    roots = [c.id for c in case.claims.values() if c.parent is None]
    if not roots:
        bad("NO_ROOT", "claims", "no parentless claim; the tree needs exactly one root")
    elif len(roots) > 1:
        for rid in sorted(roots):
            bad("MULTIPLE_ROOTS", rid, f"{len(roots)} parentless claims; the tree needs exactly one root")

    for claim in case.claims.values():
        if not claim.text.strip():
            bad("EMPTY_CLAIM_TEXT", claim.id, "claim text must be non-empty")
        if claim.parent is not None:
            if claim.parent not in case.claims:
                bad("UNKNOWN_PARENT", claim.id, f"parent {claim.parent!r} is not in the claim table")
            elif claim.id not in case.claims[claim.parent].children:
                bad("PARENT_CHILD_MISMATCH", claim.id, f"parent {claim.parent!r} does not list this claim as a child")
        for child in claim.children:
            if child not in case.claims:
                bad("UNKNOWN_CHILD", claim.id, f"child {child!r} is not in the claim table")
            elif case.claims[child].parent != claim.id:
                bad("PARENT_CHILD_MISMATCH", claim.id, f"child {child!r} names a different parent")
        if claim.status is ClaimStatus.ASSESSED:
            for ca in claim.counter_arguments:
                if not (ca.rejection or "").strip():
                    bad("MISSING_REJECTION", claim.id, "assessed claim retains a counter-argument without a rejection")
        for ca in claim.counter_arguments:
            for ev_id in ca.rejection_evidence:
                if ev_id not in case.evidence:
                    bad("DANGLING_REJECTION_EVIDENCE", claim.id, f"rejection cites unknown evidence {ev_id!r}")

    # reachability: consistent trees where some claims never reach a root
    if len(roots) == 1:
        reachable = set(_walk_children(case, roots[0]))
        for cid in case.claims:
            if cid not in reachable and _parent_chain_consistent(case, cid):
                bad("CLAIM_CYCLE", cid, "claim is not reachable from the root (parent chain loops)")

    for idx, link in enumerate(case.links):
        where = f"links[{idx}]"
        if link.claim_id not in case.claims:
            bad("DANGLING_LINK", where, f"link references unknown claim {link.claim_id!r}")
        if link.evidence_id not in case.evidence:
            bad("DANGLING_LINK", where, f"link references unknown evidence {link.evidence_id!r}")

    for ev in case.evidence.values():
        if not ev.exists:
            flags = (
                ev.active_confirmed,
                ev.flagged_major_revision,
                ev.partially_outdated_flagged,
                ev.revision_history_documented,
                ev.approvals_documented,
                ev.controlled_environment,
            )
            if any(flags) or ev.last_review is not None:
                bad("EVIDENCE_STATUS_CONFLICT", ev.id, "a record marked missing cannot carry review status")
        if ev.last_review is not None and ev.last_review < ev.created:
            bad("REVIEW_BEFORE_CREATED", ev.id, "last_review predates created")

    out.sort(key=lambda v: (v.location, v.code))
    return ValidationReport(tuple(out))


def _walk_children(case: SafetyCase, start: str) -> Iterator[str]:
    stack = [start]
    seen: set[str] = set()
    while stack:
        cid = stack.pop()
        if cid in seen or cid not in case.claims:
            continue
        seen.add(cid)
        yield cid
        stack.extend(reversed(case.claims[cid].children))


def _parent_chain_consistent(case: SafetyCase, cid: str) -> bool:
    # true when every hop exists and mutually agrees; such a chain that never
    # reaches a root must be cyclic
    seen = set()
    cur = cid
    while cur not in seen:
        seen.add(cur)
        claim = case.claims.get(cur)
        if claim is None or claim.parent is None:
            return False
        parent = case.claims.get(claim.parent)
        if parent is None or cur not in parent.children:
            return False
        cur = claim.parent
    return True


# ---------------------------------------------------------------------------
# traversal


def traverse(case: SafetyCase, order: str = "pre") -> tuple[str, ...]:
    """Deterministic depth-first claim-id ordering.

    ``pre`` lists each parent before its children, ``post`` lists children
    (left to right) before their parent; the root is last in post order.
    Raises ModelError on trees a walk cannot cover (cycles, multiple roots).
    """
    if order not in ("pre", "post"):
        raise ModelError(f"unknown traversal order {order!r}", code="BAD_ORDER")
    root = case.root_id()

    visited: set[str] = set()
    out: list[str] = []

    def visit(cid: str) -> None:
        if cid in visited:
            raise ModelError("claim tree contains a cycle", code="CLAIM_CYCLE", location=cid)
        visited.add(cid)
        claim = case.claims.get(cid)
        if claim is None:
            raise ModelError(f"child reference to unknown claim {cid!r}", code="UNKNOWN_CHILD", location=cid)
        if order == "pre":
            out.append(cid)
        for child in claim.children:
            visit(child)
        if order == "post":
            out.append(cid)

    visit(root)
    unreached = set(case.claims) - visited
    if unreached:
        raise ModelError(
            f"{len(unreached)} claims unreachable from root", code="CLAIM_CYCLE", location=sorted(unreached)[0]
        )
    return tuple(out)
