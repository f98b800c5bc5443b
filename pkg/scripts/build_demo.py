"""Regenerate the bundled demo case and its companion files.

Writes canonical bytes into src/casekit/fixtures/. Run from the repo root:

    python scripts/build_demo.py
"""
from __future__ import annotations

import json
import sys
from datetime import date
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from casekit.canon import canonical_json_pretty  # noqa: E402
from casekit.model import (  # noqa: E402
    CaseScope,
    Claim,
    ClaimStatus,
    CounterArgument,
    Evidence,
    EvidenceKind,
    EvidenceLink,
    SafetyCase,
    validate_case,
)
from casekit.formats import serialize_case  # noqa: E402

NARRATED = ClaimStatus.NARRATED
PROC = EvidenceKind.PROCEDURAL
IMPL = EvidenceKind.IMPLEMENTATION

FAMILY_REASONABLE = "Reasonableness of acceptance criterion"
FAMILY_METHOD = "The methodology provides credible evidence for criterion evaluation"
FAMILY_COVERAGE = "Coverage Claims"
FAMILY_CONFIDENCE = "Confidence Claims"


def build_case() -> SafetyCase:
    scope = CaseScope(
        system_description=(
            "Urban driverless ride-hailing service, generation-5 vehicle platform running the "
            "2026.2 driving software release."
        ),
        application=(
            "Commercial driverless ride-hailing for public riders, including passenger pick-up "
            "and drop-off on public roads."
        ),
        environment=(
            "Dense-urban operating area of Meridian City: surface streets up to 45 mph, daytime "
            "and nighttime, excluding heavy snow and ice."
        ),
        assumptions=(
            "Remote fleet response is staffed around the clock",
            "Vehicle maintenance follows the published service schedule",
        ),
    )

    claims = [
        Claim(
            id="1",
            text=(
                "The automated driving system is acceptably safe for driverless ride-hailing "
                "within the approved operating area."
            ),
            children=("1.1",),
            poc="Dana Whitfield",
            justification_narrative=(
                "The safety determination rests on acceptance criteria covering behavioral "
                "competence and crash avoidance. Each criterion branch below argues its own "
                "reasonableness and the credibility of the methodology that evaluates it."
            ),
            status=NARRATED,
        ),
        Claim(
            id="1.1",
            text=(
                "Criterion AC-1 (collision avoidance in reasonably foreseeable urban conflicts) "
                "is an appropriate acceptance criterion for judging readiness of a candidate "
                "release."
            ),
            parent="1",
            children=("1.1.1", "1.1.2"),
            poc="Priya Raman",
            limitations=(
                "AC-1 addresses collision-avoidance competence; passenger-comfort metrics are "
                "tracked outside this case.",
            ),
            justification_narrative=(
                "AC-1 readiness is argued in two halves: the criterion itself is reasonable for "
                "the operating area, and the methodology that evaluates it produces credible "
                "evidence."
            ),
            status=NARRATED,
        ),
        Claim(
            id="1.1.1",
            text=(
                "The selection of AC-1, its performance indicators, and its targets is "
                "reasonable for the approved operating area."
            ),
            parent="1.1",
            children=("1.1.1.1", "1.1.1.2", "1.1.1.3"),
            family=FAMILY_REASONABLE,
            poc="Miguel Torres",
            counter_arguments=(
                CounterArgument(
                    text=(
                        "A fixed collision-avoidance target may overlook rare but severe "
                        "conflict geometries, so meeting AC-1 would not indicate readiness."
                    ),
                    rejection=(
                        "Severe-but-rare geometries are enumerated in the hazard catalog and "
                        "carry dedicated indicators inside AC-1; the target sensitivity "
                        "analysis shows the criterion reacts to them."
                    ),
                    rejection_evidence=("EV-TGT-2",),
                ),
            ),
            justification_narrative=(
                "Reasonableness is decomposed into indicator selection, target setting, and "
                "result aggregation; each leaf cites the artifact that justifies it."
            ),
            status=NARRATED,
        ),
        Claim(
            id="1.1.1.1",
            text=(
                "Performance indicators for AC-1 capture the conflict types observed in the "
                "approved operating area."
            ),
            parent="1.1.1",
            family=FAMILY_REASONABLE,
            poc="Miguel Torres",
            status=NARRATED,
        ),
        Claim(
            id="1.1.1.2",
            text=(
                "Targets for AC-1 are set against a credible human-driver benchmark for the "
                "same operating area."
            ),
            parent="1.1.1",
            family=FAMILY_REASONABLE,
            poc="Miguel Torres",
            limitations=(
                "The benchmark predates the 2026 signal-timing changes on two arterial "
                "corridors.",
            ),
            status=NARRATED,
        ),
        Claim(
            id="1.1.1.3",
            text=(
                "Aggregation of AC-1 results across scenario groups preserves identified risk "
                "concentrations rather than averaging them away."
            ),
            parent="1.1.1",
            family=FAMILY_REASONABLE,
            poc="Miguel Torres",
            status=NARRATED,
        ),
        Claim(
            id="1.1.2",
            text="The evaluation methodology provides credible evidence for deciding AC-1.",
            parent="1.1",
            children=("1.1.2.1", "1.1.2.2"),
            family=FAMILY_METHOD,
            poc="Priya Raman",
            justification_narrative=(
                "Methodology credibility decomposes into coverage of the relevant conflict "
                "space and confidence in the produced results."
            ),
            status=NARRATED,
        ),
        Claim(
            id="1.1.2.1",
            text="The evaluation campaign covers the conflict space relevant to AC-1.",
            parent="1.1.2",
            children=("1.1.2.1.1", "1.1.2.1.2", "1.1.2.1.3"),
            family=FAMILY_COVERAGE,
            poc="Jonas Beck",
            justification_narrative=(
                "Coverage rests on known unsafe scenarios, a discovery program for unknown "
                "ones, and representation of foreseeable operating conditions."
            ),
            status=NARRATED,
        ),
        Claim(
            id="1.1.2.1.1",
            text=(
                "Known unsafe scenario classes from the hazard catalog are represented in the "
                "evaluation campaign."
            ),
            parent="1.1.2.1",
            family=FAMILY_COVERAGE,
            poc="Jonas Beck",
            status=NARRATED,
        ),
        Claim(
            id="1.1.2.1.2",
            text=(
                "The discovery program surfaces previously unknown unsafe scenario classes at "
                "a tracked, declining rate."
            ),
            parent="1.1.2.1",
            family=FAMILY_COVERAGE,
            poc="Jonas Beck",
            status=NARRATED,
        ),
        Claim(
            id="1.1.2.1.3",
            text=(
                "Reasonably foreseeable operating conditions of the approved area are "
                "represented in the evaluation mix."
            ),
            parent="1.1.2.1",
            family=FAMILY_COVERAGE,
            poc="Jonas Beck",
            limitations=("Construction-zone reconfigurations are sampled from 2025 city permits only.",),
            status=NARRATED,
        ),
        Claim(
            id="1.1.2.2",
            text="Results produced by the methodology warrant confidence for the AC-1 decision.",
            parent="1.1.2",
            children=("1.1.2.2.1", "1.1.2.2.2", "1.1.2.2.3"),
            family=FAMILY_CONFIDENCE,
            poc="Leah Ortiz",
            justification_narrative=(
                "Confidence rests on data adequacy, scientific validity of the simulation "
                "stack, and qualification of the tooling that produces the results."
            ),
            status=NARRATED,
        ),
        Claim(
            id="1.1.2.2.1",
            text="Data volumes behind AC-1 results are adequate for the statistical claims made.",
            parent="1.1.2.2",
            family=FAMILY_CONFIDENCE,
            poc="Leah Ortiz",
            status=NARRATED,
        ),
        Claim(
            id="1.1.2.2.2",
            text="The simulation stack is scientifically valid for the conflict types it evaluates.",
            parent="1.1.2.2",
            family=FAMILY_CONFIDENCE,
            poc="Leah Ortiz",
            counter_arguments=(
                CounterArgument(
                    text="Simulation fidelity gaps could bias AC-1 results toward optimistic outcomes.",
                    rejection=(
                        "Fidelity is checked against instrumented track reconstructions each "
                        "release; divergences gate result publication."
                    ),
                    rejection_evidence=("EV-SIM-2",),
                ),
            ),
            limitations=("Sensor-noise replay covers the production sensor suite only.",),
            status=NARRATED,
        ),
        Claim(
            id="1.1.2.2.3",
            text=(
                "A tooling qualification policy defines qualification requirements for tools "
                "in the results pipeline."
            ),
            parent="1.1.2.2",
            family=FAMILY_CONFIDENCE,
            poc="Priya Raman",
            status=NARRATED,
        ),
    ]

    evidence = [
        Evidence(
            id="EV-HAZ-1",
            title="Hazard catalog 2026-Q2 snapshot",
            kind=IMPL,
            uri="docs://safety/hazard-catalog/2026-q2",
            owner="Nora Feld",
            owner_affiliated=True,
            created=date(2026, 6, 20),
            last_review=date(2026, 6, 30),
            active_confirmed=True,
            revision_history_documented=True,
            approvals_documented=True,
            controlled_environment=True,
        ),
        Evidence(
            id="EV-IND-1",
            title="Conflict-type indicator definition document",
            kind=PROC,
            uri="docs://safety/ac1/indicator-definitions",
            owner="Miguel Torres",
            owner_affiliated=True,
            created=date(2025, 2, 14),
            last_review=date(2026, 3, 30),
            active_confirmed=True,
            revision_history_documented=True,
            approvals_documented=True,
            controlled_environment=False,
        ),
        Evidence(
            id="EV-TGT-1",
            title="Benchmark study: human-driver baseline for Meridian City",
            kind=IMPL,
            uri="docs://safety/ac1/human-baseline-study",
            owner="Sofia Aldana",
            owner_affiliated=False,
            created=date(2025, 5, 1),
            last_review=date(2026, 4, 15),
            active_confirmed=True,
            revision_history_documented=True,
            approvals_documented=False,
            controlled_environment=False,
        ),
        Evidence(
            id="EV-TGT-2",
            title="Target sensitivity analysis for severe conflict geometries",
            kind=IMPL,
            uri="docs://safety/ac1/target-sensitivity",
            owner="Miguel Torres",
            owner_affiliated=True,
            created=date(2026, 2, 20),
            last_review=date(2026, 5, 10),
            active_confirmed=True,
            revision_history_documented=True,
            approvals_documented=True,
            controlled_environment=True,
        ),
        Evidence(
            id="EV-AGG-1",
            title="Result aggregation design note",
            kind=PROC,
            uri="docs://safety/ac1/aggregation-design",
            owner=None,
            created=date(2025, 10, 1),
            last_review=date(2026, 6, 1),
            active_confirmed=True,
            revision_history_documented=True,
            approvals_documented=True,
            controlled_environment=True,
        ),
        Evidence(
            id="EV-ODD-1",
            title="Operating-condition sampling specification",
            kind=PROC,
            uri="docs://safety/coverage/odd-sampling-spec",
            owner="Mara Quinn",
            owner_affiliated=True,
            created=date(2024, 11, 5),
            last_review=date(2025, 6, 20),
            active_confirmed=False,
            revision_history_documented=True,
            approvals_documented=True,
            controlled_environment=True,
        ),
        Evidence(
            id="EV-DISC-1",
            title="Unknown-unsafe discovery rate dashboard",
            kind=IMPL,
            uri="docs://safety/coverage/discovery-dashboard",
            owner="Jonas Beck",
            owner_affiliated=True,
            created=date(2025, 9, 12),
            last_review=date(2026, 1, 10),
            active_confirmed=True,
            revision_history_documented=False,
            approvals_documented=False,
            controlled_environment=True,
        ),
        Evidence(
            id="EV-DATA-1",
            title="Statistical power assessment for AC-1 datasets",
            kind=IMPL,
            uri="docs://safety/confidence/statistical-power",
            owner="Leah Ortiz",
            owner_affiliated=True,
            created=date(2026, 3, 5),
            last_review=None,
            active_confirmed=False,
            revision_history_documented=False,
            approvals_documented=False,
            controlled_environment=True,
        ),
        Evidence(
            id="EV-SIM-1",
            title="Simulation validation methodology",
            kind=PROC,
            uri="docs://safety/confidence/sim-validation-method",
            owner="Leah Ortiz",
            owner_affiliated=True,
            created=date(2024, 8, 15),
            last_review=date(2026, 7, 20),
            active_confirmed=True,
            flagged_major_revision=True,
            revision_history_documented=True,
            approvals_documented=True,
            controlled_environment=True,
        ),
        Evidence(
            id="EV-SIM-2",
            title="Track-reconstruction fidelity comparison 2026-Q2",
            kind=IMPL,
            uri="docs://safety/confidence/fidelity-2026-q2",
            owner="Leah Ortiz",
            owner_affiliated=True,
            created=date(2026, 6, 28),
            last_review=date(2026, 6, 28),
            active_confirmed=True,
            revision_history_documented=True,
            approvals_documented=True,
            controlled_environment=True,
        ),
        Evidence(
            id="EV-TOOL-1",
            title="Tooling qualification policy",
            kind=PROC,
            uri="docs://safety/confidence/tooling-qualification-policy",
            owner="Priya Raman",
            owner_affiliated=True,
            created=date(2025, 12, 1),
            last_review=date(2026, 3, 1),
            active_confirmed=True,
            partially_outdated_flagged=True,
            revision_history_documented=True,
            approvals_documented=True,
            controlled_environment=False,
        ),
        Evidence(
            id="EV-MISS-1",
            title="Field monitoring latency study",
            kind=IMPL,
            uri="docs://safety/confidence/field-monitoring-latency",
            owner=None,
            created=date(2026, 1, 1),
            exists=False,
        ),
    ]

    links = (
        EvidenceLink("1.1.1.1", "EV-IND-1"),
        EvidenceLink("1.1.1.1", "EV-HAZ-1", note="Indicators are cross-checked against the catalog."),
        EvidenceLink("1.1.1.2", "EV-TGT-1"),
        EvidenceLink("1.1.1.3", "EV-AGG-1"),
        EvidenceLink("1.1.2.1.1", "EV-HAZ-1"),
        EvidenceLink("1.1.2.1.2", "EV-DISC-1"),
        EvidenceLink("1.1.2.1.3", "EV-ODD-1"),
        EvidenceLink("1.1.2.2.1", "EV-DATA-1"),
        EvidenceLink("1.1.2.2.1", "EV-MISS-1", note="Planned study; artifact confirmed missing."),
        EvidenceLink("1.1.2.2.2", "EV-SIM-1"),
        EvidenceLink("1.1.2.2.2", "EV-SIM-2"),
        EvidenceLink("1.1.2.2.3", "EV-TOOL-1"),
    )

    return SafetyCase(scope=scope, claims=claims, evidence=evidence, links=links, version=1)


ASSESSED_AT = "2026-07-25"
ASSESSOR = ["Iris Kohl"]


def demo_assessments() -> list[dict]:
    def rec(claim_id, procedural, implementation, summary, **kw):
        base = {
            "claim_id": claim_id,
            "procedural": procedural,
            "implementation": implementation,
            "procedural_na": False,
            "implementation_na": False,
            "na_justification": None,
            "summary": summary,
            "assessor": ASSESSOR,
            "assessed_at": ASSESSED_AT,
            "case_version": 1,
        }
        base.update(kw)
        return base

    return [
        rec(
            "1.1.1.1", 3, 2,
            "Indicator definitions are complete and governed; the catalog cross-check ran on "
            "the prior quarter's snapshot.",
        ),
        rec(
            "1.1.1.2", 2, 1,
            "Target-setting procedure is documented, but the benchmark study lost its owner "
            "and predates the corridor signal-timing changes.",
        ),
        rec(
            "1.1.1.3", 2, 2,
            "Aggregation design is sound and applied; the design note still lacks a named "
            "owner.",
        ),
        rec(
            "1.1.2.1.1", 2, 3,
            "Catalog process is adequate and the 2026-Q2 snapshot shows full representation "
            "in the campaign.",
        ),
        rec(
            "1.1.2.1.2", 2, 2,
            "Discovery program runs continuously; rate tracking supports the claim though "
            "dashboard reviews are informal.",
        ),
        rec(
            "1.1.2.1.3", 2, 2,
            "Sampling specification covers the operating area; the specification itself is "
            "due a reconfirmation pass.",
        ),
        rec(
            "1.1.2.2.1", 2, 1,
            "Power assessment methodology reads well, but the field monitoring latency study "
            "is missing, leaving a data gap.",
        ),
        rec(
            "1.1.2.2.2", 3, 3,
            "Validation methodology is thorough and the fidelity comparison gates releases as "
            "designed.",
        ),
        rec(
            "1.1.2.2.3", 2, None,
            "The qualification policy exists, is approved, and names its scope.",
            implementation_na=True,
            na_justification=(
                "The claim asserts the existence and scope of the qualification policy; "
                "application of the policy is judged under the results-pipeline claims."
            ),
        ),
        rec(
            "1.1.1", 2, 2,
            "Criterion selection argument holds together; target credibility is the weak "
            "spot to watch.",
        ),
        rec(
            "1.1.2.1", 2, 2,
            "Coverage argument is coherent and the discovery trend supports it.",
        ),
        rec(
            "1.1.2.2", 2, 2,
            "Confidence argument is adequate overall despite the missing latency study.",
        ),
    ]


def demo_actions() -> list[dict]:
    return [
        {
            "location": "1.1.1.2",
            "text": (
                "Commission a refreshed human-driver benchmark with a named, affiliated owner "
                "before the next assessment cycle."
            ),
        },
        {
            "location": "EV-MISS-1",
            "text": (
                "Confirm scope and owner for the field monitoring latency study or withdraw "
                "the dependent data-adequacy claim."
            ),
        },
    ]


def main() -> None:
    fixtures = ROOT / "src" / "casekit" / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    case = build_case()
    report = validate_case(case)
    if not report.ok:
        for v in report.violations:
            print(f"{v.code} at {v.location}: {v.message}")
        raise SystemExit("demo case is invalid")
    (fixtures / "demo.case.json").write_bytes(serialize_case(case))
    (fixtures / "demo_assessments.json").write_text(
        canonical_json_pretty(demo_assessments()), encoding="utf-8"
    )
    (fixtures / "demo_actions.json").write_text(
        canonical_json_pretty(demo_actions()), encoding="utf-8"
    )
    print(f"wrote {fixtures / 'demo.case.json'}")
    print(f"wrote {fixtures / 'demo_assessments.json'}")
    print(f"wrote {fixtures / 'demo_actions.json'}")


if __name__ == "__main__":
    main()
