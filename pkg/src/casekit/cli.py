"""Command-line front door.

Exit codes: 0 success; 1 usage error; 2 validation or lint problems were
found and --strict was given; 3 file I/O failure. Data problems without
--strict still exit 0: findings are output, not failures.
"""
from __future__ import annotations

import argparse
import json
import sys
from datetime import date
from pathlib import Path

from .canon import canonical_json, canonical_json_pretty, parse_date
from .errors import CaseKitError, ParseError
from .assessment import (
    AssessmentLog,
    assessment_from_dict,
    assessment_to_dict,
    record_assessment,
)
from .evidence import score_library
from .formats import (
    import_tabular,
    parse_case,
    read_tabular_csv,
    serialize_case,
    write_tabular_csv,
    export_tabular,
)
from .lifecycle import TriggerEvent, classify, diff_cases, mark_stale, trigger_from_dict, trigger_to_dict
from .lint import SEV_ERROR, lint_case
from .model import SafetyCase, validate_case
from .report import SuggestedAction, build_report, render_markdown, render_radar_svg, render_report_json
from .rollup import CONSERVATIVE_MIN, STRATEGIES, rollup, spoke_values

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FINDINGS = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract here is 1
    def error(self, message):  # noqa: D102
        raise _UsageError(message)


def _common(parser: argparse.ArgumentParser, *, log: bool = False, as_of: bool = False, fmt: tuple[str, ...] = ()):
    parser.add_argument("--case", required=True, help="path to the canonical .case.json document")
    if log:
        parser.add_argument("--log", help="assessment log path (default: <case>.assessments.jsonl)")
    if as_of:
        parser.add_argument("--as-of", help="reference date YYYY-MM-DD (default: today)")
    if fmt:
        parser.add_argument("--format", choices=fmt, default=fmt[0], help="output format")
    parser.add_argument("--out", help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="casekit", description="Assurance-case assessment toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check structural invariants")
    _common(p, fmt=("text", "json"))
    p.add_argument("--strict", action="store_true", help="exit 2 when violations exist")

    p = sub.add_parser("lint", help="run advisory hygiene checks")
    _common(p, log=True, fmt=("text", "json"))
    p.add_argument("--strict", action="store_true", help="exit 2 when error-severity findings exist")

    p = sub.add_parser("score-evidence", help="mechanically score the evidence library")
    _common(p, as_of=True, fmt=("text", "json"))
    p.add_argument("--threshold", type=int, default=2)

    p = sub.add_parser("assess", help="record claim assessments")
    _common(p, log=True)
    p.add_argument("--from-file", help="JSON file holding one record or a list of records")

    p = sub.add_parser("rollup", help="aggregate assessment scores over the tree")
    _common(p, log=True, fmt=("text", "json"))
    p.add_argument("--strategy", choices=STRATEGIES, default=CONSERVATIVE_MIN)
    p.add_argument("--threshold", type=int, default=2)

    p = sub.add_parser("report", help="build the full assessment report")
    _common(p, log=True, as_of=True, fmt=("md", "json"))
    p.add_argument("--strategy", choices=STRATEGIES, default=CONSERVATIVE_MIN)
    p.add_argument("--threshold", type=int, default=2)
    p.add_argument("--actions", help="JSON file of suggested actions [{location, text}, ...]")

    p = sub.add_parser("radar", help="render the per-family radar chart")
    _common(p, log=True)
    p.add_argument("--strategy", choices=STRATEGIES, default=CONSERVATIVE_MIN)
    p.add_argument("--threshold", type=int, default=2)

    p = sub.add_parser("diff", help="compare two case snapshots")
    p.add_argument("old", help="path to the older .case.json")
    p.add_argument("new", help="path to the newer .case.json")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("trigger", help="raise a change trigger and mark staleness")
    _common(p, log=True)
    p.add_argument("--kind", required=True, choices=("hardware", "software", "odd", "use_case"))
    p.add_argument("--description", required=True)
    p.add_argument("--claims", required=True, help="comma-separated claim ids or family tags")
    p.add_argument("--id", dest="trigger_id", help="trigger id (default: derived from the trigger log length)")
    p.add_argument("--raised-at", help="date YYYY-MM-DD (default: today)")

    p = sub.add_parser("export-csv", help="project the case onto the tabular worksheet")
    _common(p)

    p = sub.add_parser("import-csv", help="build a canonical document from a worksheet")
    p.add_argument("csv", help="path to the .case.csv worksheet")
    p.add_argument("--out")

    p = sub.add_parser("serve", help="serve the case to the local workbench UI")
    _common(p, log=True)
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--ui-dir", help="directory of workbench static files to serve at /")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _dispatch(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CaseKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    handlers = {
        "validate": _cmd_validate,
        "lint": _cmd_lint,
        "score-evidence": _cmd_score,
        "assess": _cmd_assess,
        "rollup": _cmd_rollup,
        "report": _cmd_report,
        "radar": _cmd_radar,
        "diff": _cmd_diff,
        "trigger": _cmd_trigger,
        "export-csv": _cmd_export_csv,
        "import-csv": _cmd_import_csv,
        "serve": _cmd_serve,
    }
    return handlers[args.command](args)


def _load_case(path: str) -> SafetyCase:
    return parse_case(Path(path).read_bytes())


def _aux_path(case_path: Path, suffix: str) -> Path:
    stem = case_path.name
    if stem.endswith(".case.json"):
        stem = stem[: -len(".case.json")]
    else:
        stem = case_path.stem
    return case_path.with_name(f"{stem}{suffix}")


def _log_path(args) -> Path:
    if getattr(args, "log", None):
        return Path(args.log)
    return _aux_path(Path(args.case), ".assessments.jsonl")


def _as_of(args) -> date:
    if getattr(args, "as_of", None):
        return parse_date(args.as_of)
    return date.today()


def _emit(args, payload: str | bytes) -> None:
    if getattr(args, "out", None):
        data = payload if isinstance(payload, bytes) else payload.encode("utf-8")
        Path(args.out).write_bytes(data)
    else:
        text = payload.decode("utf-8") if isinstance(payload, bytes) else payload
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _cmd_validate(args) -> int:
    # parse_case refuses invalid documents outright, but this command's job
    # is to report the violations, so unpack them instead of failing
    try:
        case = _load_case(args.case)
        violations = ()
    except ParseError as exc:
        if exc.code != "INVALID_CASE":
            raise
        case = None
        violations = exc.violations
    if args.format == "json":
        _emit(args, canonical_json_pretty([
            {"code": v.code, "location": v.location, "message": v.message} for v in violations
        ]))
    elif case is not None:
        _emit(args, f"OK: {len(case.claims)} claims, {len(case.evidence)} evidence records, version {case.version}")
    else:
        _emit(args, "\n".join(f"{v.code} at {v.location}: {v.message}" for v in violations))
    if violations and args.strict:
        return EXIT_FINDINGS
    return EXIT_OK


def _cmd_lint(args) -> int:
    case = _load_case(args.case)
    log_path = _log_path(args)
    assessments = AssessmentLog.load(log_path).current() if log_path.exists() else None
    findings = lint_case(case, assessments)
    if args.format == "json":
        _emit(args, canonical_json_pretty([
            {"rule": f.rule, "severity": f.severity, "location": f.location, "message": f.message}
            for f in findings
        ]))
    elif findings:
        _emit(args, "\n".join(f"{f.severity:7s} {f.rule:18s} {f.location}: {f.message}" for f in findings))
    else:
        _emit(args, "no lint findings")
    if args.strict and any(f.severity == SEV_ERROR for f in findings):
        return EXIT_FINDINGS
    return EXIT_OK


def _cmd_score(args) -> int:
    case = _load_case(args.case)
    report = score_library(case, _as_of(args), threshold=args.threshold)
    if args.format == "json":
        _emit(args, canonical_json_pretty({
            "as_of": report.as_of.isoformat(),
            "case_version": report.case_version,
            "counts": {str(k): v for k, v in report.counts.items()},
            "threshold": report.threshold,
            "below_threshold": list(report.below_threshold),
            "scores": [
                {"evidence_id": s.evidence_id, "score": s.score, "rule_trace": list(s.rule_trace)}
                for s in report.scores
            ],
        }))
    else:
        lines = [f"{s.evidence_id:12s} {s.score}  {s.rule_trace[-1]}" for s in report.scores]
        lines.append("counts: " + ", ".join(f"{k}:{v}" for k, v in sorted(report.counts.items())))
        if report.below_threshold:
            lines.append(f"below threshold ({report.threshold}): " + ", ".join(report.below_threshold))
        _emit(args, "\n".join(lines))
    return EXIT_OK


def _cmd_assess(args) -> int:
    case = _load_case(args.case)
    log = AssessmentLog.load(_log_path(args))
    if args.from_file:
        raw = json.loads(Path(args.from_file).read_text(encoding="utf-8"))
        records = raw if isinstance(raw, list) else [raw]
    else:
        records = [_prompt_record(case)]
    stored = []
    for obj in records:
        rec = assessment_from_dict(obj) if isinstance(obj, dict) else obj
        stored.append(record_assessment(case, log, rec))
    _emit(args, "\n".join(canonical_json(assessment_to_dict(r)) for r in stored))
    return EXIT_OK


def _prompt_record(case: SafetyCase):
    # minimal interactive path; scripted use goes through --from-file
    from .assessment import ClaimAssessment

    claim_id = input("claim id: ").strip()

    def dim(name: str):
        raw = input(f"{name} score 0-3 (or 'na'): ").strip().lower()
        if raw == "na":
            return None, True
        return int(raw), False

    procedural, procedural_na = dim("procedural")
    implementation, implementation_na = dim("implementation")
    na_justification = None
    if procedural_na or implementation_na:
        na_justification = input("justification for the not-applicable mark: ").strip()
    summary = input("summary: ").strip()
    assessor = [a.strip() for a in input("assessor name(s), comma-separated: ").split(",") if a.strip()]
    return ClaimAssessment(
        claim_id=claim_id,
        procedural=procedural,
        implementation=implementation,
        procedural_na=procedural_na,
        implementation_na=implementation_na,
        na_justification=na_justification,
        summary=summary,
        assessor=tuple(assessor),
        assessed_at=date.today(),
        case_version=case.version,
    )


def _rollup_from_args(args, case: SafetyCase):
    log_path = _log_path(args)
    log = AssessmentLog.load(log_path) if log_path.exists() else AssessmentLog()
    current = log.current()
    result = rollup(case, current, strategy=args.strategy, threshold=args.threshold)
    return log, current, result


def _cmd_rollup(args) -> int:
    case = _load_case(args.case)
    _, _, result = _rollup_from_args(args, case)
    if args.format == "json":
        _emit(args, canonical_json_pretty(_rollup_document(case, result)))
    else:
        from .model import traverse

        lines = []
        for cid in traverse(case, "pre"):
            node = result.nodes[cid]
            proc = "-" if node.procedural is None else str(node.procedural)
            impl = "-" if node.implementation is None else str(node.implementation)
            lines.append(f"{cid:14s} procedural={proc:5s} implementation={impl:5s} source={node.source}")
        if result.low_score_register:
            lines.append(
                "low-score register: "
                + "; ".join(f"{e.claim_id} {e.dimension}={e.score}" for e in result.low_score_register)
            )
        _emit(args, "\n".join(lines))
    return EXIT_OK


def _rollup_document(case: SafetyCase, result) -> dict:
    from .model import traverse

    return {
        "case_version": result.case_version,
        "strategy": result.strategy,
        "threshold": result.threshold,
        "nodes": [
            {
                "claim_id": cid,
                "procedural": None if (n := result.nodes[cid]).procedural is None else str(n.procedural),
                "implementation": None if n.implementation is None else str(n.implementation),
                "source": n.source,
                "contributing_children": list(n.contributing_children),
                "overridden_dimensions": list(n.overridden_dimensions),
            }
            for cid in traverse(case, "pre")
        ],
        "low_score_register": [
            {"claim_id": e.claim_id, "dimension": e.dimension, "score": e.score}
            for e in result.low_score_register
        ],
        "warnings": list(result.warnings),
    }


def _stale_worklist(case: SafetyCase, current) -> tuple[str, ...]:
    from .model import traverse

    stale = {cid for cid, rec in current.items() if rec.stale and cid in case.claims}
    return tuple(cid for cid in traverse(case, "post") if cid in stale)


def _cmd_report(args) -> int:
    case = _load_case(args.case)
    log, current, result = _rollup_from_args(args, case)
    hygiene = score_library(case, _as_of(args), threshold=args.threshold)
    lints = lint_case(case, current)
    actions = ()
    if args.actions:
        raw = json.loads(Path(args.actions).read_text(encoding="utf-8"))
        actions = tuple(SuggestedAction(location=a["location"], text=a["text"]) for a in raw)
    report = build_report(
        case,
        result,
        hygiene,
        lints,
        worklist=_stale_worklist(case, current),
        suggested_actions=actions,
        as_of=_as_of(args),
    )
    if args.format == "json":
        _emit(args, render_report_json(report))
    else:
        _emit(args, render_markdown(report))
    return EXIT_OK


def _cmd_radar(args) -> int:
    case = _load_case(args.case)
    _, _, result = _rollup_from_args(args, case)
    _emit(args, render_radar_svg(spoke_values(case, result)))
    return EXIT_OK


def _cmd_diff(args) -> int:
    old = _load_case(args.old)
    new = _load_case(args.new)
    changes = diff_cases(old, new)
    if args.format == "json":
        _emit(args, canonical_json_pretty([
            {
                "kind": item.kind.value,
                "location": item.location,
                "old_hash": item.old_hash,
                "new_hash": item.new_hash,
                "classification": classify(item),
            }
            for item in changes
        ]))
    elif len(changes) == 0:
        _emit(args, "no changes")
    else:
        _emit(args, "\n".join(
            f"{classify(item):11s} {item.kind.value:16s} {item.location}" for item in changes
        ))
    return EXIT_OK


def _cmd_trigger(args) -> int:
    case = _load_case(args.case)
    log = AssessmentLog.load(_log_path(args))
    trigger_path = _aux_path(Path(args.case), ".triggers.jsonl")
    existing = []
    if trigger_path.exists():
        existing = [json.loads(line) for line in trigger_path.read_text(encoding="utf-8").splitlines() if line.strip()]
    raised_at = parse_date(args.raised_at) if args.raised_at else date.today()
    trigger = TriggerEvent(
        id=args.trigger_id or f"T{len(existing) + 1}",
        kind=args.kind,
        description=args.description,
        affected_claims=tuple(c.strip() for c in args.claims.split(",") if c.strip()),
        raised_at=raised_at,
    )
    update = mark_stale(case, log, changes=None, triggers=(trigger,))
    with trigger_path.open("a", encoding="utf-8") as fh:
        fh.write(canonical_json(trigger_to_dict(trigger)) + "\n")
    lines = [f"trigger {trigger.id} recorded ({trigger.kind}): {trigger.description}"]
    lines.append("stale: " + (", ".join(update.stale_claims) if update.stale_claims else "none"))
    lines.append("worklist: " + (", ".join(w.target for w in update.worklist) if update.worklist else "empty"))
    _emit(args, "\n".join(lines))
    return EXIT_OK


def _cmd_export_csv(args) -> int:
    case = _load_case(args.case)
    _emit(args, write_tabular_csv(export_tabular(case)))
    return EXIT_OK


def _cmd_import_csv(args) -> int:
    case = import_tabular(read_tabular_csv(Path(args.csv).read_bytes()))
    _emit(args, serialize_case(case))
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import serve

    serve(
        case_path=Path(args.case),
        log_path=_log_path(args),
        port=args.port,
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
