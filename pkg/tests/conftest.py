from __future__ import annotations

import pytest

from casekit.assessment import AssessmentLog, assessment_from_dict, record_assessment
from casekit.fixtures import demo_assessments, demo_case_bytes
from casekit.formats import parse_case


@pytest.fixture(scope="session")
def demo_bytes() -> bytes:
    return demo_case_bytes()


@pytest.fixture(scope="session")
def demo_case(demo_bytes):
    return parse_case(demo_bytes)


@pytest.fixture()
def demo_log(demo_case, tmp_path):
    log = AssessmentLog(path=tmp_path / "demo.assessments.jsonl")
    for obj in demo_assessments():
        record_assessment(demo_case, log, assessment_from_dict(obj))
    return log


@pytest.fixture()
def demo_current(demo_log):
    return demo_log.current()


# -- acceptance summary ------------------------------------------------------
# Criterion tests live in test_acceptance.py; after the run, print one
# verdict line per criterion so the result is legible without scrolling.

CRITERIA = {
    "test_truth_table_equivalence": "truth-table equivalence (512-case grid vs oracle)",
    "test_rollup_properties": "roll-up properties on 1,000 random trees",
    "test_small_instance_oracle": "roll-up equals brute force on 200 small trees",
    "test_round_trip": "canonical and tabular round-trips",
    "test_scoring_independence": "evidence scores independent of claim assessments",
    "test_lifecycle_staleness": "staleness marks exactly the ancestor chain",
    "test_rubric_fidelity_and_overstatement": "rubric byte-match and L-OVERSTATE boundaries",
    "test_end_to_end_demo": "end-to-end demo pipeline with golden outputs",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1].split("[")[0]
            if name in CRITERIA:
                verdict = "PASS" if status == "passed" else "FAIL"
                lines.append((name, f"ACCEPTANCE {verdict}  {CRITERIA[name]}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        seen = set()
        for name, line in sorted(lines, key=lambda p: list(CRITERIA).index(p[0])):
            if name not in seen:
                seen.add(name)
                terminalreporter.write_line(line)
