"""Local HTTP service backing the workbench UI.

The service holds one immutable case snapshot plus the append-only logs. All
mutation goes through a single lock, and writers must present the state
version they believe is current (``X-Expected-Version``); a mismatch is a
conflict carrying the current version, never a silent overwrite. Reads are
recomputed from the snapshot and the current log on every request, so a
client that just posted an assessment sees it reflected immediately.

The state version starts at the case document version and strictly increases
with every accepted mutation. It is derived from the persisted logs, never
stored, which makes it stable across restarts with the same files on disk;
writers must treat the value returned in a response as the new current one.

Binds loopback only; this is a local review tool, not a deployment target.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import date
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .canon import canonical_json_pretty, parse_date
from .errors import AssessmentError, CaseKitError, LifecycleError
from .assessment import AssessmentLog, assessment_from_dict, assessment_to_dict, record_assessment
from .evidence import score_library
from .formats import parse_case, serialize_case
from .lifecycle import TriggerEvent, mark_stale, trigger_from_dict, trigger_to_dict
from .lint import lint_case
from .model import SafetyCase, traverse
from .report import SuggestedAction, build_report, render_radar_svg, report_document
from .rollup import CONSERVATIVE_MIN, STRATEGIES, rollup, spoke_values
from .assessment import rubric_table

QUEUE_REASONS = ("stale", "unassessed", "below_threshold")


@dataclass
class SessionState:
    """Everything one served session knows, guarded by one writer lock."""

    case: SafetyCase
    log: AssessmentLog
    trigger_path: Path | None = None
    actions: tuple[SuggestedAction, ...] = ()

    def __post_init__(self):
        self.lock = threading.Lock()
        self.trigger_count = 0
        if self.trigger_path is not None and self.trigger_path.exists():
            self.trigger_count = sum(
                1 for line in self.trigger_path.read_text(encoding="utf-8").splitlines() if line.strip()
            )

    @property
    def state_version(self) -> int:
        # derived, never stored: reloading the same files yields the same value
        return self.case.version + len(self.log) + self.trigger_count

    def post_assessment(self, payload: dict, expected_version: int) -> tuple[int, dict]:
        with self.lock:
            if expected_version != self.state_version:
                return 409, {"error": "version_conflict", "current_version": self.state_version}
            rec = assessment_from_dict(payload)
            stored = record_assessment(self.case, self.log, rec)
            return 200, {"stored": assessment_to_dict(stored), "current_version": self.state_version}

    def post_trigger(self, payload: dict, expected_version: int) -> tuple[int, dict]:
        with self.lock:
            if expected_version != self.state_version:
                return 409, {"error": "version_conflict", "current_version": self.state_version}
            trigger = trigger_from_dict(payload)
            update = mark_stale(self.case, self.log, changes=None, triggers=(trigger,))
            if self.trigger_path is not None:
                with self.trigger_path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(trigger_to_dict(trigger), sort_keys=True) + "\n")
            self.trigger_count += 1
            return 200, {
                "trigger": trigger_to_dict(trigger),
                "stale_claims": list(update.stale_claims),
                "affected_claims": list(update.affected_claims),
                "current_version": self.state_version,
            }

    def queue(self, threshold: int = 2) -> list[dict]:
        """Claims needing attention: stale, then unassessed, then low-scoring.

        Within one severity bucket, tree (pre-order) position decides. Each
        claim appears once under its most severe reason.
        """
        current = self.log.current()
        entries = []
        for position, claim_id in enumerate(traverse(self.case, "pre")):
            rec = current.get(claim_id)
            if rec is None:
                reason, detail = "unassessed", "no recorded assessment"
            elif rec.stale:
                reason, detail = "stale", "assessment predates a substantial change or trigger"
            else:
                low = [
                    f"{dim}={rec.score(dim)}"
                    for dim in ("procedural", "implementation")
                    if not rec.is_na(dim) and rec.score(dim) is not None and rec.score(dim) < threshold
                ]
                if not low:
                    continue
                reason, detail = "below_threshold", ", ".join(low)
            entries.append(
                {
                    "claim_id": claim_id,
                    "reason": reason,
                    "detail": detail,
                    "position": position,
                }
            )
        severity = {name: pos for pos, name in enumerate(QUEUE_REASONS)}
        entries.sort(key=lambda e: (severity[e["reason"]], e["position"]))
        for e in entries:
            del e["position"]
        return entries


class _Handler(BaseHTTPRequestHandler):
    state: SessionState  # assigned by serve()
    ui_dir: Path | None = None
    protocol_version = "HTTP/1.1"

    # -- plumbing -----------------------------------------------------------

    def log_message(self, *args) -> None:  # keep test output clean
        pass

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("X-Case-Version", str(self.state.case.version))
        self.send_header("X-State-Version", str(self.state.state_version))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type, X-Expected-Version")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, value: object) -> None:
        self._send(status, canonical_json_pretty(value).encode("utf-8"), "application/json; charset=utf-8")

    def _error(self, status: int, code: str, message: str, **extra) -> None:
        self._send_json(status, {"error": code, "message": message, **extra})

    def _expected_version(self) -> int | None:
        raw = self.headers.get("X-Expected-Version")
        if raw is None:
            return None
        try:
            return int(raw)
        except ValueError:
            return None

    def _read_body(self) -> dict | None:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            value = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return None
        return value if isinstance(value, dict) else None

    # -- routes -------------------------------------------------------------

    def do_OPTIONS(self) -> None:  # noqa: N802
        self._send(204, b"", "text/plain")

    def do_GET(self) -> None:  # noqa: N802
        url = urlparse(self.path)
        query = {k: v[-1] for k, v in parse_qs(url.query).items()}
        try:
            if url.path == "/case":
                self._send(200, serialize_case(self.state.case), "application/json; charset=utf-8")
            elif url.path == "/rollup":
                self._send_json(200, self._rollup_doc(query))
            elif url.path == "/report":
                self._send_json(200, self._report_doc(query))
            elif url.path == "/radar.svg":
                result = self._rollup(query)
                svg = render_radar_svg(spoke_values(self.state.case, result))
                self._send(200, svg, "image/svg+xml; charset=utf-8")
            elif url.path == "/queue":
                self._send_json(200, self.state.queue(threshold=int(query.get("threshold", "2"))))
            elif url.path == "/rubric":
                self._send_json(
                    200,
                    {
                        dim: {
                            str(level): {"title": cell.title, "guidance": cell.guidance}
                            for level, cell in cells.items()
                        }
                        for dim, cells in rubric_table().items()
                    },
                )
            elif self.ui_dir is not None:
                self._send_static(url.path)
            else:
                self._error(404, "not_found", f"unknown path {url.path}")
        except CaseKitError as exc:
            self._error(422, exc.code, str(exc))
        except ValueError as exc:
            self._error(400, "bad_request", str(exc))

    def do_POST(self) -> None:  # noqa: N802
        url = urlparse(self.path)
        if url.path not in ("/assessments", "/triggers"):
            self._error(404, "not_found", f"unknown path {url.path}")
            return
        expected = self._expected_version()
        if expected is None:
            self._error(400, "missing_expected_version", "X-Expected-Version header is required")
            return
        payload = self._read_body()
        if payload is None:
            self._error(400, "bad_body", "request body must be a JSON object")
            return
        try:
            if url.path == "/assessments":
                status, body = self.state.post_assessment(payload, expected)
            else:
                status, body = self.state.post_trigger(payload, expected)
        except AssessmentError as exc:
            if exc.code == "UNKNOWN_CLAIM":
                self._error(404, exc.code, str(exc))
            elif exc.code == "STALE_VERSION":
                self._error(409, exc.code, str(exc), current_version=self.state.state_version)
            else:
                self._error(422, exc.code, str(exc), field=exc.field)
            return
        except LifecycleError as exc:
            status_code = 404 if exc.code == "UNKNOWN_CLAIM" else 422
            self._error(status_code, exc.code, str(exc))
            return
        except CaseKitError as exc:
            self._error(422, exc.code, str(exc))
            return
        self._send_json(status, body)

    # -- helpers ------------------------------------------------------------

    def _rollup(self, query: dict):
        strategy = query.get("strategy", CONSERVATIVE_MIN)
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        threshold = int(query.get("threshold", "2"))
        return rollup(self.state.case, self.state.log.current(), strategy=strategy, threshold=threshold)

    def _rollup_doc(self, query: dict) -> dict:
        from .cli import _rollup_document

        return _rollup_document(self.state.case, self._rollup(query))

    def _report_doc(self, query: dict) -> dict:
        case = self.state.case
        result = self._rollup(query)
        as_of = parse_date(query["as_of"]) if "as_of" in query else date.today()
        current = self.state.log.current()
        hygiene = score_library(case, as_of, threshold=int(query.get("threshold", "2")))
        stale = {cid for cid, rec in current.items() if rec.stale and cid in case.claims}
        worklist = tuple(cid for cid in traverse(case, "post") if cid in stale)
        report = build_report(
            case,
            result,
            hygiene,
            lint_case(case, current),
            worklist=worklist,
            suggested_actions=self.state.actions,
            as_of=as_of,
        )
        return report_document(report)

    def _send_static(self, path: str) -> None:
        name = path.lstrip("/") or "index.html"
        target = (self.ui_dir / name).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._error(404, "not_found", f"unknown path {path}")
            return
        types = {
            ".html": "text/html; charset=utf-8",
            ".js": "application/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
            ".svg": "image/svg+xml; charset=utf-8",
            ".json": "application/json; charset=utf-8",
        }
        self._send(200, target.read_bytes(), types.get(target.suffix, "application/octet-stream"))


def make_server(
    case: SafetyCase,
    log: AssessmentLog,
    port: int = 0,
    trigger_path: Path | None = None,
    actions: tuple[SuggestedAction, ...] = (),
    ui_dir: Path | None = None,
) -> ThreadingHTTPServer:
    """Build a ready-to-run server bound to loopback; port 0 picks a free one."""
    state = SessionState(case=case, log=log, trigger_path=trigger_path, actions=actions)
    handler = type("BoundHandler", (_Handler,), {"state": state, "ui_dir": ui_dir})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(case_path: Path, log_path: Path, port: int, ui_dir: Path | None = None) -> None:
    """Blocking entry point used by the command line."""
    case = parse_case(case_path.read_bytes())
    log = AssessmentLog.load(log_path)
    trigger_path = case_path.with_name(case_path.name.replace(".case.json", "") + ".triggers.jsonl")
    server = make_server(case, log, port=port, trigger_path=trigger_path, ui_dir=ui_dir)
    host, bound_port = server.server_address
    print(f"serving {case_path} on http://{host}:{bound_port}/ (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:  # pragma: no cover - interactive only
        server.shutdown()
