"""Case file formats.

Two formats are supported:

* the canonical JSON document (``.case.json``): full fidelity, UTF-8, LF,
  sorted keys, newline-terminated, byte-deterministic. ``parse_case`` and
  ``serialize_case`` are exact inverses on canonical bytes.
* a tabular worksheet (``.case.csv``): the seven-column review layout used
  when a case is drafted in a spreadsheet. Lossy by design: claim family,
  point-of-contact, and lifecycle status have no column, and evidence cells
  carry identity only (full review metadata lives in the JSON document).
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import date

from .canon import canonical_json_pretty, iso, parse_date
from .errors import ModelError, ParseError, TabularError
from .model import (
    CaseScope,
    Claim,
    ClaimStatus,
    CounterArgument,
    Evidence,
    EvidenceKind,
    EvidenceLink,
    SafetyCase,
    traverse,
    validate_case,
)

# ---------------------------------------------------------------------------
# canonical JSON document


def case_document(case: SafetyCase) -> dict:
    """Plain-data projection of a case; the single source of JSON shape."""
    return {
        "scope": {
            "system_description": case.scope.system_description,
            "application": case.scope.application,
            "environment": case.scope.environment,
            "assumptions": list(case.scope.assumptions),
        },
        "claims": [
            {
                "id": c.id,
                "text": c.text,
                "parent": c.parent,
                "children": list(c.children),
                "family": c.family,
                "poc": c.poc,
                "counter_arguments": [
                    {
                        "text": ca.text,
                        "rejection": ca.rejection,
                        "rejection_evidence": list(ca.rejection_evidence),
                    }
                    for ca in c.counter_arguments
                ],
                "limitations": list(c.limitations),
                "justification_narrative": c.justification_narrative,
                "status": c.status.value,
            }
            for c in sorted(case.claims.values(), key=lambda c: c.id)
        ],
        "evidence": [
            {
                "id": e.id,
                "title": e.title,
                "kind": e.kind.value,
                "uri": e.uri,
                "owner": e.owner,
                "owner_affiliated": e.owner_affiliated,
                "created": iso(e.created),
                "last_review": iso(e.last_review),
                "active_confirmed": e.active_confirmed,
                "flagged_major_revision": e.flagged_major_revision,
                "partially_outdated_flagged": e.partially_outdated_flagged,
                "revision_history_documented": e.revision_history_documented,
                "approvals_documented": e.approvals_documented,
                "controlled_environment": e.controlled_environment,
                "exists": e.exists,
            }
            for e in sorted(case.evidence.values(), key=lambda e: e.id)
        ],
        "links": [
            {"claim_id": l.claim_id, "evidence_id": l.evidence_id, "note": l.note} for l in case.links
        ],
        "version": case.version,
    }


def serialize_case(case: SafetyCase) -> bytes:
    """Canonical bytes for a valid case. Refuses structurally invalid input."""
    report = validate_case(case)
    if not report.ok:
        first = report.violations[0]
        raise ModelError(
            f"cannot serialize an invalid case ({len(report.violations)} violations; "
            f"first: {first.code} at {first.location})",
            code="INVALID_CASE",
            location=first.location,
        )
    return canonical_json_pretty(case_document(case)).encode("utf-8")


def parse_case(data: bytes | str) -> SafetyCase:
    """Parse canonical JSON bytes into a validated case.

    Syntax errors carry line/column; schema errors carry the offending key
    path; structural violations found by validate_case fail the parse too.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON: {exc.msg}", code="SYNTAX", line=exc.lineno, column=exc.colno
        ) from exc
    case = case_from_document(raw)
    report = validate_case(case)
    if not report.ok:
        first = report.violations[0]
        raise ParseError(
            f"document violates case invariants ({len(report.violations)} violations; "
            f"first: {first.code} at {first.location})",
            code="INVALID_CASE",
            location=first.location,
            violations=report.violations,
        )
    return case


def case_from_document(raw: object) -> SafetyCase:
    """Build a case from plain JSON data, enforcing the closed schema."""
    top = _obj(raw, "$")
    _allow(top, "$", {"scope", "claims", "evidence", "links", "version"})
    scope_obj = _obj(_req(top, "scope", "$"), "scope")
    _allow(scope_obj, "scope", {"system_description", "application", "environment", "assumptions"})
    scope = CaseScope(
        system_description=_str(_req(scope_obj, "system_description", "scope"), "scope.system_description"),
        application=_str(_req(scope_obj, "application", "scope"), "scope.application"),
        environment=_str(_req(scope_obj, "environment", "scope"), "scope.environment"),
        assumptions=tuple(
            _str(v, f"scope.assumptions[{i}]") for i, v in enumerate(_arr(_req(scope_obj, "assumptions", "scope"), "scope.assumptions"))
        ),
    )

    claims: list[Claim] = []
    for i, item in enumerate(_arr(_req(top, "claims", "$"), "claims")):
        path = f"claims[{i}]"
        obj = _obj(item, path)
        _allow(
            obj,
            path,
            {
                "id", "text", "parent", "children", "family", "poc",
                "counter_arguments", "limitations", "justification_narrative", "status",
            },
        )
        cas = []
        for j, ca_raw in enumerate(_arr(_req(obj, "counter_arguments", path), f"{path}.counter_arguments")):
            ca_path = f"{path}.counter_arguments[{j}]"
            ca_obj = _obj(ca_raw, ca_path)
            _allow(ca_obj, ca_path, {"text", "rejection", "rejection_evidence"})
            cas.append(
                CounterArgument(
                    text=_str(_req(ca_obj, "text", ca_path), f"{ca_path}.text"),
                    rejection=_opt_str(_req(ca_obj, "rejection", ca_path), f"{ca_path}.rejection"),
                    rejection_evidence=tuple(
                        _str(v, f"{ca_path}.rejection_evidence[{k}]")
                        for k, v in enumerate(_arr(_req(ca_obj, "rejection_evidence", ca_path), f"{ca_path}.rejection_evidence"))
                    ),
                )
            )
        claims.append(
            Claim(
                id=_str(_req(obj, "id", path), f"{path}.id"),
                text=_str(_req(obj, "text", path), f"{path}.text"),
                parent=_opt_str(_req(obj, "parent", path), f"{path}.parent"),
                children=tuple(
                    _str(v, f"{path}.children[{k}]") for k, v in enumerate(_arr(_req(obj, "children", path), f"{path}.children"))
                ),
                family=_opt_str(_req(obj, "family", path), f"{path}.family"),
                poc=_opt_str(_req(obj, "poc", path), f"{path}.poc"),
                counter_arguments=tuple(cas),
                limitations=tuple(
                    _str(v, f"{path}.limitations[{k}]") for k, v in enumerate(_arr(_req(obj, "limitations", path), f"{path}.limitations"))
                ),
                justification_narrative=_opt_str(
                    _req(obj, "justification_narrative", path), f"{path}.justification_narrative"
                ),
                status=_enum(ClaimStatus, _req(obj, "status", path), f"{path}.status"),
            )
        )

    evidence: list[Evidence] = []
    for i, item in enumerate(_arr(_req(top, "evidence", "$"), "evidence")):
        path = f"evidence[{i}]"
        obj = _obj(item, path)
        _allow(
            obj,
            path,
            {
                "id", "title", "kind", "uri", "owner", "owner_affiliated", "created",
                "last_review", "active_confirmed", "flagged_major_revision",
                "partially_outdated_flagged", "revision_history_documented",
                "approvals_documented", "controlled_environment", "exists",
            },
        )
        evidence.append(
            Evidence(
                id=_str(_req(obj, "id", path), f"{path}.id"),
                title=_str(_req(obj, "title", path), f"{path}.title"),
                kind=_enum(EvidenceKind, _req(obj, "kind", path), f"{path}.kind"),
                uri=_str(_req(obj, "uri", path), f"{path}.uri"),
                owner=_opt_str(_req(obj, "owner", path), f"{path}.owner"),
                owner_affiliated=_bool(_req(obj, "owner_affiliated", path), f"{path}.owner_affiliated"),
                created=_date(_req(obj, "created", path), f"{path}.created"),
                last_review=_opt_date(_req(obj, "last_review", path), f"{path}.last_review"),
                active_confirmed=_bool(_req(obj, "active_confirmed", path), f"{path}.active_confirmed"),
                flagged_major_revision=_bool(_req(obj, "flagged_major_revision", path), f"{path}.flagged_major_revision"),
                partially_outdated_flagged=_bool(
                    _req(obj, "partially_outdated_flagged", path), f"{path}.partially_outdated_flagged"
                ),
                revision_history_documented=_bool(
                    _req(obj, "revision_history_documented", path), f"{path}.revision_history_documented"
                ),
                approvals_documented=_bool(_req(obj, "approvals_documented", path), f"{path}.approvals_documented"),
                controlled_environment=_bool(_req(obj, "controlled_environment", path), f"{path}.controlled_environment"),
                exists=_bool(_req(obj, "exists", path), f"{path}.exists"),
            )
        )

    links: list[EvidenceLink] = []
    for i, item in enumerate(_arr(_req(top, "links", "$"), "links")):
        path = f"links[{i}]"
        obj = _obj(item, path)
        _allow(obj, path, {"claim_id", "evidence_id", "note"})
        links.append(
            EvidenceLink(
                claim_id=_str(_req(obj, "claim_id", path), f"{path}.claim_id"),
                evidence_id=_str(_req(obj, "evidence_id", path), f"{path}.evidence_id"),
                note=_opt_str(_req(obj, "note", path), f"{path}.note"),
            )
        )

    version = _req(top, "version", "$")
    if not isinstance(version, int) or isinstance(version, bool) or version < 1:
        _fail("version", "expected a positive integer")

    try:
        return SafetyCase(scope=scope, claims=claims, evidence=evidence, links=tuple(links), version=version)
    except ModelError as exc:
        raise ParseError(str(exc), code=exc.code, location=exc.location) from exc


# schema walk helpers; every failure names the offending path


def _fail(path: str, message: str):
    raise ParseError(f"{message}", code="SCHEMA", location=path)


def _req(obj: dict, key: str, path: str):
    if key not in obj:
        _fail(f"{path}.{key}" if path != "$" else key, "missing required key")
    return obj[key]


def _allow(obj: dict, path: str, keys: set[str]) -> None:
    unknown = sorted(set(obj) - keys)
    if unknown:
        _fail(f"{path}.{unknown[0]}" if path != "$" else unknown[0], "unknown key")


def _obj(value, path: str) -> dict:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _arr(value, path: str) -> list:
    if not isinstance(value, list):
        _fail(path, f"expected an array, got {type(value).__name__}")
    return value


def _str(value, path: str) -> str:
    if not isinstance(value, str):
        _fail(path, f"expected a string, got {type(value).__name__}")
    return value


def _opt_str(value, path: str) -> str | None:
    if value is None:
        return None
    return _str(value, path)


def _bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        _fail(path, f"expected a boolean, got {type(value).__name__}")
    return value


def _date(value, path: str) -> date:
    text = _str(value, path)
    try:
        return parse_date(text)
    except ValueError:
        _fail(path, f"expected an ISO-8601 date (YYYY-MM-DD), got {text!r}")


def _opt_date(value, path: str) -> date | None:
    if value is None:
        return None
    return _date(value, path)


def _enum(enum_cls, value, path: str):
    text = _str(value, path)
    try:
        return enum_cls(text)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        _fail(path, f"expected one of [{allowed}], got {text!r}")


# ---------------------------------------------------------------------------
# tabular worksheet


TABULAR_HEADERS = (
    "Context",
    "Claim ID",
    "Claim",
    "Evidence",
    "Limitations/Scope",
    "Counter Argument + Rejection",
    "Justification Narrative",
)

_REJECTION_MARKER = "Rejection:"
_REJECTION_EVIDENCE_MARKER = "Rejection evidence:"
_EVIDENCE_SEP = " :: "
_STUB_CREATED = date(1970, 1, 1)  # deterministic floor; scores conservatively


@dataclass(frozen=True)
class TabularRow:
    context: str
    claim_id: str
    claim: str
    evidence: str
    limitations: str
    counter_argument: str
    narrative: str


def export_tabular(case: SafetyCase) -> list[TabularRow]:
    """Project a case onto worksheet rows, one claim per row in tree order.

    Claim ids must already be dotted paths (child ids extend their parent's id
    by one dot-separated segment) because the worksheet encodes hierarchy only
    through the Claim ID column.
    """
    order = traverse(case, "pre")
    for cid in order:
        claim = case.claims[cid]
        if claim.parent is not None and _dotted_parent(cid) != claim.parent:
            raise TabularError(
                f"claim id {cid!r} does not extend its parent id {claim.parent!r}; "
                "the worksheet cannot encode this hierarchy",
                code="NON_PATH_IDS",
                location=cid,
            )
    context = _context_cell(case.scope)
    rows = []
    for cid in order:
        claim = case.claims[cid]
        rows.append(
            TabularRow(
                # the worksheet states context once per use case; replicating it
                # on every row keeps rows self-describing when sorted or filtered
                context=context,
                claim_id=cid,
                claim=claim.text,
                evidence="\n".join(
                    _EVIDENCE_SEP.join((e.id, e.kind.value, e.title, e.uri))
                    for e in (case.evidence[eid] for eid in case.linked_evidence(cid))
                ),
                limitations="\n".join(claim.limitations),
                counter_argument="\n\n".join(_counter_cell(ca) for ca in claim.counter_arguments),
                narrative=claim.justification_narrative or "",
            )
        )
    return rows


def import_tabular(rows: list[TabularRow]) -> SafetyCase:
    """Build a case from worksheet rows.

    Hierarchy comes from dotted-path claim ids; every non-root id must extend
    an id seen earlier. Evidence cells become library stubs whose review
    metadata is unknown, which the hygiene scorer treats conservatively.
    """
    if not rows:
        raise TabularError("worksheet has no claim rows", code="EMPTY")
    seen: dict[str, TabularRow] = {}
    for row in rows:
        cid = row.claim_id.strip()
        if not cid:
            raise TabularError("empty Claim ID", code="MALFORMED_CLAIM_ID", location=row.claim)
        if cid in seen:
            raise TabularError(f"duplicate Claim ID {cid!r}", code="DUPLICATE_CLAIM_ID", location=cid)
        seen[cid] = row

    roots = [cid for cid in seen if "." not in cid]
    if len(roots) != 1:
        raise TabularError(
            f"worksheet must contain exactly one root id (found {len(roots)})",
            code="MULTIPLE_ROOTS" if roots else "NO_ROOT",
        )
    children: dict[str, list[str]] = {cid: [] for cid in seen}
    for cid in seen:  # row order defines sibling order
        if "." in cid:
            parent = _dotted_parent(cid)
            if parent not in seen:
                raise TabularError(
                    f"claim id {cid!r} has no row for its parent {parent!r}",
                    code="NON_CONTIGUOUS_HIERARCHY",
                    location=cid,
                )
            children[parent].append(cid)

    evidence: dict[str, Evidence] = {}
    links: list[EvidenceLink] = []
    claims: list[Claim] = []
    for cid, row in seen.items():
        for ev in _parse_evidence_cell(row.evidence, cid):
            prior = evidence.get(ev.id)
            if prior is not None and prior != ev:
                raise TabularError(
                    f"evidence {ev.id!r} redefined with different fields",
                    code="MALFORMED_EVIDENCE_CELL",
                    location=cid,
                )
            evidence[ev.id] = ev
            links.append(EvidenceLink(claim_id=cid, evidence_id=ev.id))
        claims.append(
            Claim(
                id=cid,
                text=row.claim.strip(),
                parent=_dotted_parent(cid) if "." in cid else None,
                children=tuple(children[cid]),
                counter_arguments=tuple(_parse_counter_cell(row.counter_argument, cid)),
                limitations=tuple(line for line in row.limitations.splitlines() if line.strip()),
                justification_narrative=row.narrative.strip() or None,
            )
        )

    # rejection citations may name evidence no claim links to; keep the
    # citation resolvable with an unlinked stub rather than dropping it
    for claim in claims:
        for ca in claim.counter_arguments:
            for ev_id in ca.rejection_evidence:
                if ev_id not in evidence:
                    evidence[ev_id] = Evidence(
                        id=ev_id,
                        title=ev_id,
                        kind=EvidenceKind.PROCEDURAL,
                        uri="",
                        created=_STUB_CREATED,
                    )

    case = SafetyCase(
        scope=_parse_context_cell(seen[roots[0]].context),
        claims=claims,
        evidence=evidence,
        links=tuple(links),
        version=1,
    )
    report = validate_case(case)
    if not report.ok:
        first = report.violations[0]
        raise TabularError(
            f"imported worksheet violates case invariants (first: {first.code} at {first.location})",
            code="INVALID_CASE",
            location=first.location,
            violations=report.violations,
        )
    return case


def read_tabular_csv(data: bytes | str) -> list[TabularRow]:
    """Read worksheet rows from RFC-4180 CSV; the header row is mandatory."""
    text = data.decode("utf-8-sig") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise TabularError("empty CSV", code="EMPTY") from None
    if tuple(h.strip() for h in header) != TABULAR_HEADERS:
        raise TabularError(
            f"bad header row: expected {list(TABULAR_HEADERS)}, got {header}",
            code="BAD_HEADER",
        )
    rows = []
    for i, rec in enumerate(reader):
        if not any(cell.strip() for cell in rec):
            continue  # ignore blank padding rows
        if len(rec) != len(TABULAR_HEADERS):
            raise TabularError(
                f"row {i + 2} has {len(rec)} cells, expected {len(TABULAR_HEADERS)}",
                code="BAD_ROW",
                location=f"row {i + 2}",
            )
        rows.append(TabularRow(*rec))
    return rows


def write_tabular_csv(rows: list[TabularRow]) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(TABULAR_HEADERS)
    for row in rows:
        writer.writerow(
            (row.context, row.claim_id, row.claim, row.evidence, row.limitations, row.counter_argument, row.narrative)
        )
    return buf.getvalue().encode("utf-8")


def _dotted_parent(cid: str) -> str:
    return cid.rsplit(".", 1)[0]


def _context_cell(scope: CaseScope) -> str:
    lines = [
        f"System: {scope.system_description}",
        f"Application: {scope.application}",
        f"Environment: {scope.environment}",
    ]
    if scope.assumptions:
        lines.append("Assumptions: " + "; ".join(scope.assumptions))
    return "\n".join(lines)


def _parse_context_cell(cell: str) -> CaseScope:
    fields = {"System": "", "Application": "", "Environment": "", "Assumptions": ""}
    labeled = False
    for line in cell.splitlines():
        head, sep, tail = line.partition(":")
        if sep and head.strip() in fields:
            fields[head.strip()] = tail.strip()
            labeled = True
    if not labeled:
        # hand-written sheets often carry one free-form context blurb
        blurb = cell.strip() or "unspecified"
        return CaseScope(system_description=blurb, application=blurb, environment=blurb)
    return CaseScope(
        system_description=fields["System"] or "unspecified",
        application=fields["Application"] or "unspecified",
        environment=fields["Environment"] or "unspecified",
        assumptions=tuple(a.strip() for a in fields["Assumptions"].split(";") if a.strip()),
    )


def _counter_cell(ca: CounterArgument) -> str:
    parts = [ca.text]
    if ca.rejection is not None:
        parts.append(f"{_REJECTION_MARKER} {ca.rejection}")
    if ca.rejection_evidence:
        parts.append(f"{_REJECTION_EVIDENCE_MARKER} " + ", ".join(ca.rejection_evidence))
    return "\n".join(parts)


def _parse_counter_cell(cell: str, claim_id: str) -> list[CounterArgument]:
    out = []
    for block in cell.split("\n\n"):
        if not block.strip():
            continue
        rejection_evidence: tuple[str, ...] = ()
        tail_pos = block.find(_REJECTION_EVIDENCE_MARKER)
        if tail_pos != -1:
            ev_text = block[tail_pos + len(_REJECTION_EVIDENCE_MARKER):]
            rejection_evidence = tuple(e.strip() for e in ev_text.split(",") if e.strip())
            block = block[:tail_pos]
        text, sep, rejection = block.partition(_REJECTION_MARKER)
        if not text.strip():
            raise TabularError(
                "counter-argument cell has a rejection but no counter-argument text",
                code="MALFORMED_COUNTER_ARGUMENT",
                location=claim_id,
            )
        out.append(
            CounterArgument(
                text=text.strip(),
                rejection=rejection.strip() if sep else None,
                rejection_evidence=rejection_evidence,
            )
        )
    return out


def _parse_evidence_cell(cell: str, claim_id: str) -> list[Evidence]:
    out = []
    for n, line in enumerate(l for l in cell.splitlines() if l.strip()):
        parts = line.split(_EVIDENCE_SEP)
        if len(parts) == 4:
            ev_id, kind_text, title, uri = (p.strip() for p in parts)
            try:
                kind = EvidenceKind(kind_text)
            except ValueError:
                raise TabularError(
                    f"unknown evidence kind {kind_text!r}",
                    code="MALFORMED_EVIDENCE_CELL",
                    location=claim_id,
                ) from None
        elif len(parts) == 1:
            # bare title from a hand-written sheet; identity is synthesized
            ev_id, kind, title, uri = f"{claim_id}/e{n + 1}", EvidenceKind.PROCEDURAL, line.strip(), ""
        else:
            raise TabularError(
                f"evidence line must be 'id :: kind :: title :: uri' or a bare title, got {line!r}",
                code="MALFORMED_EVIDENCE_CELL",
                location=claim_id,
            )
        out.append(Evidence(id=ev_id, title=title, kind=kind, uri=uri, created=_STUB_CREATED))
    return out
