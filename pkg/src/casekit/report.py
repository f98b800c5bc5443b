"""Report assembly and rendering.

``build_report`` snapshots everything a reviewer needs into one
self-contained value; ``render_markdown`` and ``render_radar_svg`` turn that
value into byte-deterministic documents. Rendering never recomputes scores,
so a report can be rebuilt later from its inputs and compared byte for byte.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from fractions import Fraction

from .canon import canonical_json_pretty, iso
from .errors import ReportError
from .evidence import EvidenceHygieneReport
from .lint import LintFinding
from .model import SafetyCase, traverse
from .rollup import PROCEDURAL, IMPLEMENTATION, RadarData, RegisterEntry, RollupResult

_EXCERPT_CHARS = 100


@dataclass(frozen=True)
class SuggestedAction:
    location: str
    text: str


@dataclass(frozen=True)
class Finding:
    claim_id: str
    dimension: str
    score: int
    excerpt: str


@dataclass(frozen=True)
class RollupRow:
    claim_id: str
    depth: int
    family: str | None
    excerpt: str
    procedural: Fraction | None
    implementation: Fraction | None
    source: str


@dataclass(frozen=True)
class AssessmentReport:
    """A complete assessment snapshot; the seven sections a reviewer reads."""

    case_title: str
    case_version: int
    canonical_hash: str
    as_of: date
    strategy: str
    threshold: int
    findings: tuple[Finding, ...]
    low_score_register: tuple[RegisterEntry, ...]
    rollup_rows: tuple[RollupRow, ...]
    hygiene: EvidenceHygieneReport
    lints: tuple[LintFinding, ...]
    worklist: tuple[str, ...]
    suggested_actions: tuple[SuggestedAction, ...]

    SECTION_COUNT = 7


def build_report(
    case: SafetyCase,
    result: RollupResult,
    hygiene: EvidenceHygieneReport,
    lints: tuple[LintFinding, ...],
    worklist: tuple[str, ...] = (),
    suggested_actions: tuple[SuggestedAction, ...] = (),
    as_of: date | None = None,
) -> AssessmentReport:
    """Assemble a report; refuses inputs computed against different versions."""
    if result.case_version != case.version or hygiene.case_version != case.version:
        raise ReportError(
            f"inputs disagree on case version (case {case.version}, roll-up "
            f"{result.case_version}, hygiene {hygiene.case_version})",
            code="VERSION_MISMATCH",
        )
    depth: dict[str, int] = {}
    rows = []
    for claim_id in traverse(case, "pre"):
        claim = case.claims[claim_id]
        depth[claim_id] = 0 if claim.parent is None else depth[claim.parent] + 1
        node = result.nodes.get(claim_id)
        rows.append(
            RollupRow(
                claim_id=claim_id,
                depth=depth[claim_id],
                family=claim.family,
                excerpt=_excerpt(claim.text),
                procedural=node.procedural if node else None,
                implementation=node.implementation if node else None,
                source=node.source if node else "direct",
            )
        )
    findings = tuple(
        Finding(
            claim_id=entry.claim_id,
            dimension=entry.dimension,
            score=entry.score,
            excerpt=_excerpt(case.claims[entry.claim_id].text) if entry.claim_id in case.claims else "",
        )
        for entry in result.low_score_register
    )
    return AssessmentReport(
        case_title=case.scope.system_description,
        case_version=case.version,
        canonical_hash=case.canonical_hash,
        as_of=as_of if as_of is not None else hygiene.as_of,
        strategy=result.strategy,
        threshold=result.threshold,
        findings=findings,
        low_score_register=result.low_score_register,
        rollup_rows=tuple(rows),
        hygiene=hygiene,
        lints=tuple(lints),
        worklist=tuple(worklist),
        suggested_actions=tuple(suggested_actions),
    )


def frac_str(value: Fraction | None) -> str:
    if value is None:
        return "-"
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value} (~{value.numerator / value.denominator:.2f})"


def _excerpt(text: str) -> str:
    flat = " ".join(text.split())
    if len(flat) <= _EXCERPT_CHARS:
        return flat
    return flat[: _EXCERPT_CHARS - 3].rstrip() + "..."


# ---------------------------------------------------------------------------
# markdown


def render_markdown(report: AssessmentReport) -> str:
    """Deterministic Markdown; same report value, same bytes, always."""
    out: list[str] = []
    w = out.append
    w(f"# Case support assessment: {report.case_title}")
    w("")
    w(f"- Case version: {report.case_version}")
    w(f"- Canonical digest: `{report.canonical_hash}`")
    w(f"- As of: {report.as_of.isoformat()}")
    w(f"- Roll-up strategy: {report.strategy} (reporting threshold {report.threshold})")
    w("")

    w("## Findings")
    w("")
    if report.findings:
        w("Direct assessments below the reporting threshold. Overrides never remove rows from this section.")
        w("")
        w("| Claim | Dimension | Score | Claim text |")
        w("| --- | --- | --- | --- |")
        for f in report.findings:
            w(
                f"| <a id=\"finding-{f.claim_id}\"></a>[{f.claim_id}](#claim-{f.claim_id}) "
                f"| {f.dimension} | {f.score} | {f.excerpt} |"
            )
    else:
        w("No direct assessment sits below the reporting threshold.")
    w("")

    w("## Low-score register")
    w("")
    if report.low_score_register:
        w("| Claim | Dimension | Score |")
        w("| --- | --- | --- |")
        for entry in report.low_score_register:
            w(f"| {entry.claim_id} | {entry.dimension} | {entry.score} |")
    else:
        w("Empty.")
    w("")

    w("## Roll-up")
    w("")
    w("| Claim | Family | Procedural | Implementation | Source |")
    w("| --- | --- | --- | --- | --- |")
    for row in report.rollup_rows:
        indent = "&nbsp;&nbsp;" * row.depth
        w(
            f"| {indent}<a id=\"claim-{row.claim_id}\"></a>**{row.claim_id}** {row.excerpt} "
            f"| {row.family or '-'} | {frac_str(row.procedural)} | {frac_str(row.implementation)} "
            f"| {row.source} |"
        )
    w("")

    w("## Evidence hygiene")
    w("")
    w(f"Mechanical status scoring of the evidence library as of {report.hygiene.as_of.isoformat()}.")
    w("")
    w("| Status score | Records |")
    w("| --- | --- |")
    for level in range(4):
        w(f"| {level} | {report.hygiene.counts.get(level, 0)} |")
    w("")
    w("| Evidence | Score | Rule |")
    w("| --- | --- | --- |")
    for s in report.hygiene.scores:
        w(f"| {s.evidence_id} | {s.score} | {s.rule_trace[-1]} |")
    w("")
    if report.hygiene.below_threshold:
        w(
            f"Below threshold ({report.hygiene.threshold}): "
            + ", ".join(report.hygiene.below_threshold)
        )
    else:
        w(f"No record scores below the threshold ({report.hygiene.threshold}).")
    w("")

    w("## Lint findings")
    w("")
    if report.lints:
        w("| Severity | Rule | Location | Message |")
        w("| --- | --- | --- | --- |")
        for finding in report.lints:
            w(f"| {finding.severity} | {finding.rule} | {finding.location} | {finding.message} |")
    else:
        w("No lint findings.")
    w("")

    w("## Re-assessment worklist")
    w("")
    if report.worklist:
        for i, claim_id in enumerate(report.worklist, start=1):
            w(f"{i}. [{claim_id}](#claim-{claim_id})")
    else:
        w("No stale assessments.")
    w("")

    w("## Suggested actions")
    w("")
    if report.suggested_actions:
        for action in report.suggested_actions:
            w(f"- **{action.location}**: {action.text}")
    else:
        w("None recorded.")
    w("")

    return "\n".join(out)


def report_document(report: AssessmentReport) -> dict:
    """Plain-data projection used for JSON output and the HTTP service."""
    return {
        "case_title": report.case_title,
        "case_version": report.case_version,
        "canonical_hash": report.canonical_hash,
        "as_of": iso(report.as_of),
        "strategy": report.strategy,
        "threshold": report.threshold,
        "findings": [
            {"claim_id": f.claim_id, "dimension": f.dimension, "score": f.score, "excerpt": f.excerpt}
            for f in report.findings
        ],
        "low_score_register": [
            {"claim_id": e.claim_id, "dimension": e.dimension, "score": e.score}
            for e in report.low_score_register
        ],
        "rollup_rows": [
            {
                "claim_id": r.claim_id,
                "depth": r.depth,
                "family": r.family,
                "excerpt": r.excerpt,
                "procedural": None if r.procedural is None else str(r.procedural),
                "implementation": None if r.implementation is None else str(r.implementation),
                "source": r.source,
            }
            for r in report.rollup_rows
        ],
        "hygiene": {
            "as_of": iso(report.hygiene.as_of),
            "case_version": report.hygiene.case_version,
            "counts": {str(level): report.hygiene.counts.get(level, 0) for level in range(4)},
            "threshold": report.hygiene.threshold,
            "below_threshold": list(report.hygiene.below_threshold),
            "scores": [
                {
                    "evidence_id": s.evidence_id,
                    "score": s.score,
                    "rule_trace": list(s.rule_trace),
                    "as_of": iso(s.as_of),
                }
                for s in report.hygiene.scores
            ],
        },
        "lints": [
            {"rule": l.rule, "severity": l.severity, "location": l.location, "message": l.message}
            for l in report.lints
        ],
        "worklist": list(report.worklist),
        "suggested_actions": [{"location": a.location, "text": a.text} for a in report.suggested_actions],
    }


def render_report_json(report: AssessmentReport) -> bytes:
    return canonical_json_pretty(report_document(report)).encode("utf-8")


# ---------------------------------------------------------------------------
# radar chart

_SVG_W = 760
_SVG_H = 600
_CX = 380.0
_CY = 290.0
_R = 200.0
_COLORS = {PROCEDURAL: "#2563eb", IMPLEMENTATION: "#dc2626"}


def render_radar_svg(radar: RadarData) -> bytes:
    """Render spoke values as an SVG radar chart.

    Vertices sit at ``value / scale_max`` of the spoke radius; quantization
    happens only here, at render time, to ten decimal places. With fewer than
    three spokes a polygon degenerates, so a bar chart is drawn instead.
    An empty chart is refused.
    """
    if not radar.spokes:
        raise ReportError("radar needs at least one spoke", code="EMPTY_RADAR")
    if len(radar.spokes) < 3:
        return _render_bars(radar)

    n = len(radar.spokes)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}" font-family="sans-serif" font-size="12">',
        f'<title>Support by claim family</title>',
    ]
    for level in range(radar.scale_max + 1):
        r = _R * level / radar.scale_max
        lines.append(
            f'<circle class="ring" cx="{_fmt(_CX)}" cy="{_fmt(_CY)}" r="{_fmt(r)}" '
            f'fill="none" stroke="#cbd5e1" stroke-width="1"/>'
        )
        lines.append(
            f'<text class="ring-label" x="{_fmt(_CX + 4)}" y="{_fmt(_CY - r - 3)}" '
            f'fill="#64748b">{level}</text>'
        )
    for i, spoke in enumerate(radar.spokes):
        x, y = _vertex(i, n, Fraction(radar.scale_max), radar.scale_max)
        lines.append(
            f'<line class="spoke" x1="{_fmt(_CX)}" y1="{_fmt(_CY)}" x2="{_fmt(x)}" y2="{_fmt(y)}" '
            f'stroke="#cbd5e1" stroke-width="1"/>'
        )
        lx, ly = _vertex(i, n, Fraction(radar.scale_max) * Fraction(112, 100), radar.scale_max)
        anchor = "middle"
        cos = math.cos(_angle(i, n))
        if cos > 0.1:
            anchor = "start"
        elif cos < -0.1:
            anchor = "end"
        lines.append(
            f'<text class="spoke-label" x="{_fmt(lx)}" y="{_fmt(ly)}" text-anchor="{anchor}" '
            f'fill="#0f172a">{_esc(spoke.family)}</text>'
        )
    for dim in (PROCEDURAL, IMPLEMENTATION):
        points = []
        for i, spoke in enumerate(radar.spokes):
            value = spoke.procedural if dim == PROCEDURAL else spoke.implementation
            x, y = _vertex(i, n, value if value is not None else Fraction(0), radar.scale_max)
            points.append(f"{_fmt(x)},{_fmt(y)}")
        lines.append(
            f'<polygon class="{dim}" points="{" ".join(points)}" fill="{_COLORS[dim]}" '
            f'fill-opacity="0.15" stroke="{_COLORS[dim]}" stroke-width="2"/>'
        )
    lines.append(
        f'<rect x="20" y="{_SVG_H - 52}" width="12" height="12" fill="{_COLORS[PROCEDURAL]}"/>'
        f'<text x="38" y="{_SVG_H - 42}">procedural</text>'
    )
    lines.append(
        f'<rect x="20" y="{_SVG_H - 32}" width="12" height="12" fill="{_COLORS[IMPLEMENTATION]}"/>'
        f'<text x="38" y="{_SVG_H - 22}">implementation</text>'
    )
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _render_bars(radar: RadarData) -> bytes:
    bar_h, gap, left, top, width = 18, 14, 240, 40, 420
    rows = []
    y = top
    for spoke in radar.spokes:
        rows.append(f'<text x="{left - 10}" y="{y + 24}" text-anchor="end">{_esc(spoke.family)}</text>')
        for dim, value in ((PROCEDURAL, spoke.procedural), (IMPLEMENTATION, spoke.implementation)):
            v = value if value is not None else Fraction(0)
            bar_w = float(v) / radar.scale_max * width
            rows.append(
                f'<rect class="{dim}" x="{left}" y="{y}" width="{_fmt(bar_w)}" height="{bar_h}" '
                f'fill="{_COLORS[dim]}" fill-opacity="0.7"/>'
            )
            rows.append(f'<text x="{left + 6}" y="{y + 13}" font-size="10" fill="#fff">{dim}: {v}</text>')
            y += bar_h + 4
        y += gap
    height = y + 20
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{left + width + 40}" height="{height}" '
        f'viewBox="0 0 {left + width + 40} {height}" font-family="sans-serif" font-size="12">\n'
        f"<title>Support by claim family</title>\n" + "\n".join(rows) + "\n</svg>\n"
    )
    return svg.encode("utf-8")


def _angle(i: int, n: int) -> float:
    return -math.pi / 2 + 2 * math.pi * i / n


def _vertex(i: int, n: int, value: Fraction, scale_max: int) -> tuple[float, float]:
    radius = _R * float(value) / scale_max
    theta = _angle(i, n)
    return _CX + radius * math.cos(theta), _CY + radius * math.sin(theta)


def _fmt(x: float) -> str:
    return f"{x:.10f}".rstrip("0").rstrip(".")


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
