from __future__ import annotations

from dataclasses import replace
from datetime import date

import pytest

from casekit.assessment import AssessmentLog, ClaimAssessment, record_assessment
from casekit.errors import LifecycleError
from casekit.lifecycle import (
    MINOR,
    SUBSTANTIAL,
    TRIGGER_KINDS,
    ChangeKind,
    TriggerEvent,
    classify,
    diff_cases,
    mark_stale,
    trigger_from_dict,
    trigger_to_dict,
)
from casekit.model import CaseScope, Claim, Evidence, SafetyCase


def assess_all(case: SafetyCase, log: AssessmentLog, claim_ids=None):
    for cid in claim_ids if claim_ids is not None else case.claims:
        record_assessment(
            case,
            log,
            ClaimAssessment(
                claim_id=cid,
                summary=f"Assessment of {cid}.",
                assessor=("Quinn Vo",),
                assessed_at=date(2026, 2, 1),
                case_version=case.version,
                procedural=2,
                implementation=2,
            ),
        )


def kinds_at(changes, location):
    return sorted(i.kind for i in changes if i.location == location)


class TestDiff:
    def test_identical_cases_produce_nothing(self, demo_case):
        assert len(diff_cases(demo_case, demo_case)) == 0

    def test_claim_text_change(self, demo_case):
        edited = demo_case.with_claim(
            replace(demo_case.claims["1.1.1.2"], text="A sharper statement of the target.")
        )
        changes = diff_cases(demo_case, edited)
        items = [i for i in changes if i.kind is ChangeKind.CLAIM_TEXT]
        assert [i.location for i in items] == ["1.1.1.2"]
        assert not items[0].normalized_equal
        assert classify(items[0]) == SUBSTANTIAL

    def test_whitespace_only_edit_is_minor(self, demo_case):
        original = demo_case.claims["1.1.1.2"]
        edited = demo_case.with_claim(replace(original, text=original.text.replace(" ", "  ", 1)))
        items = [i for i in diff_cases(demo_case, edited) if i.kind is ChangeKind.CLAIM_TEXT]
        assert items[0].normalized_equal
        assert classify(items[0]) == MINOR

    def test_structure_change_on_add_and_remove(self, demo_case):
        grown = demo_case.with_claim(Claim(id="1.2", text="New branch.", parent="1")).with_claim(
            replace(demo_case.claims["1"], children=("1.1", "1.2"))
        )
        changes = diff_cases(demo_case, grown)
        locs = {i.location for i in changes if i.kind is ChangeKind.TREE_STRUCTURE}
        assert locs == {"1", "1.2"}
        for item in changes:
            assert classify(item) == SUBSTANTIAL

    def test_scope_change(self, demo_case):
        edited = demo_case.bump(
            scope=replace(demo_case.scope, environment="Expanded to suburban arterials.")
        )
        items = [i for i in diff_cases(demo_case, edited) if i.kind is ChangeKind.SCOPE]
        assert len(items) == 1 and items[0].location == "scope"
        assert classify(items[0]) == SUBSTANTIAL

    def test_narrative_and_counter_argument_changes(self, demo_case):
        original = demo_case.claims["1.1.1"]
        edited = demo_case.with_claim(
            replace(original, justification_narrative="Rewritten justification.")
        )
        items = [i for i in diff_cases(demo_case, edited) if i.kind is ChangeKind.NARRATIVE]
        assert [i.location for i in items] == ["1.1.1"]

    def test_link_set_change_lands_on_claim(self, demo_case):
        trimmed = demo_case.bump(
            links=tuple(
                l for l in demo_case.links if not (l.claim_id == "1.1.1.2" and l.evidence_id == "EV-TGT-1")
            )
        )
        items = [i for i in diff_cases(demo_case, trimmed) if i.kind is ChangeKind.EVIDENCE_SET]
        assert "1.1.1.2" in [i.location for i in items]

    def test_evidence_content_change_is_evidence_set(self, demo_case):
        edited = demo_case.with_evidence(
            replace(demo_case.evidence["EV-HAZ-1"], title="Hazard analysis, revision B")
        )
        items = [i for i in diff_cases(demo_case, edited) if i.location == "EV-HAZ-1"]
        assert [i.kind for i in items] == [ChangeKind.EVIDENCE_SET]
        assert classify(items[0]) == SUBSTANTIAL

    def test_evidence_metadata_only_change_is_version(self, demo_case):
        edited = demo_case.with_evidence(
            replace(
                demo_case.evidence["EV-HAZ-1"],
                last_review=date(2026, 7, 1),
                active_confirmed=True,
            )
        )
        items = [i for i in diff_cases(demo_case, edited) if i.location == "EV-HAZ-1"]
        assert [i.kind for i in items] == [ChangeKind.EVIDENCE_VERSION]
        assert items[0].old_hash != items[0].new_hash
        assert classify(items[0]) == MINOR

    def test_items_sorted_and_versions_recorded(self, demo_case):
        edited = demo_case.with_claim(
            replace(demo_case.claims["1.1.1.2"], text="Changed.")
        ).with_evidence(replace(demo_case.evidence["EV-HAZ-1"], last_review=date(2026, 7, 1)))
        changes = diff_cases(demo_case, edited)
        assert changes.old_version == demo_case.version
        assert changes.new_version == demo_case.version + 2
        keys = [(i.location, i.kind.value) for i in changes]
        assert keys == sorted(keys)


class TestMarkStale:
    def test_substantial_change_stales_ancestor_chain_only(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log)
        edited = demo_case.with_claim(replace(demo_case.claims["1.1.2.2.1"], text="Changed claim."))
        update = mark_stale(demo_case, log, diff_cases(demo_case, edited))
        want = {"1.1.2.2.1", "1.1.2.2", "1.1.2", "1.1", "1"}
        assert set(update.stale_claims) == want
        current = log.current()
        for cid in demo_case.claims:
            assert current[cid].stale == (cid in want), cid

    def test_minor_changes_stale_nothing(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log)
        edited = demo_case.with_evidence(
            replace(demo_case.evidence["EV-HAZ-1"], last_review=date(2026, 7, 1), active_confirmed=True)
        )
        update = mark_stale(demo_case, log, diff_cases(demo_case, edited))
        assert update.stale_claims == ()
        assert all(not rec.stale for rec in log.current().values())
        rescores = [w for w in update.worklist if w.action == "rescore_evidence"]
        assert [w.target for w in rescores] == ["EV-HAZ-1"]

    def test_scope_change_stales_root_only(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log)
        edited = demo_case.bump(scope=replace(demo_case.scope, environment="Different region."))
        update = mark_stale(demo_case, log, diff_cases(demo_case, edited))
        assert set(update.stale_claims) == {"1"}

    def test_evidence_content_change_stales_linked_claims(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log)
        edited = demo_case.with_evidence(
            replace(demo_case.evidence["EV-HAZ-1"], title="Re-scoped hazard analysis")
        )
        update = mark_stale(demo_case, log, diff_cases(demo_case, edited))
        # EV-HAZ-1 supports 1.1.1.1 and 1.1.2.1.1; both chains go stale
        want = {"1.1.1.1", "1.1.1", "1.1.2.1.1", "1.1.2.1", "1.1.2", "1.1", "1"}
        assert set(update.stale_claims) == want

    def test_marks_only_for_assessed_claims(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log, claim_ids=["1.1.2.2.1"])  # nothing else assessed
        edited = demo_case.with_claim(replace(demo_case.claims["1.1.2.2.1"], text="Changed."))
        update = mark_stale(demo_case, log, diff_cases(demo_case, edited))
        assert set(update.affected_claims) == {"1.1.2.2.1", "1.1.2.2", "1.1.2", "1.1", "1"}
        assert set(update.stale_claims) == {"1.1.2.2.1"}
        marks = [e for e in log.events if e.get("event") == "stale_mark"]
        assert [m["claim_id"] for m in marks] == ["1.1.2.2.1"]

    def test_worklist_order_rescores_then_postorder_reassessment(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log)
        edited = demo_case.with_evidence(
            replace(demo_case.evidence["EV-HAZ-1"], title="New content")
        ).with_evidence(replace(demo_case.evidence["EV-IND-1"], last_review=date(2026, 7, 2)))
        update = mark_stale(demo_case, log, diff_cases(demo_case, edited))
        actions = [w.action for w in update.worklist]
        assert actions == sorted(actions, key=("rescore_evidence", "reassess_claim").index)
        reassess = [w.target for w in update.worklist if w.action == "reassess_claim"]
        assert reassess[-1] == "1"  # root judged last
        for cid in reassess:
            for child in demo_case.claims[cid].children:
                if child in reassess:
                    assert reassess.index(child) < reassess.index(cid)

    def test_repeated_marks_not_duplicated(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log)
        edited = demo_case.with_claim(replace(demo_case.claims["1.1"], text="Changed."))
        changes = diff_cases(demo_case, edited)
        mark_stale(demo_case, log, changes)
        before = len(log.events)
        mark_stale(demo_case, log, changes)  # same changes again
        assert len(log.events) == before  # already stale, no new marks


class TestTriggers:
    def build_trigger(self, **kw):
        fields = dict(
            id="T1",
            kind="odd",
            description="Night service added to the operating domain.",
            affected_claims=("1.1.2.1",),
            raised_at=date(2026, 8, 1),
        )
        fields.update(kw)
        return TriggerEvent(**fields)

    def test_kinds_are_closed(self):
        assert TRIGGER_KINDS == ("hardware", "software", "odd", "use_case")
        with pytest.raises(LifecycleError) as e:
            self.build_trigger(kind="weather")
        assert e.value.code == "UNKNOWN_TRIGGER_KIND"

    def test_trigger_stales_chain(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log)
        update = mark_stale(demo_case, log, triggers=(self.build_trigger(),))
        assert set(update.stale_claims) == {"1.1.2.1", "1.1.2", "1.1", "1"}

    def test_trigger_resolves_family_tags(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log)
        update = mark_stale(
            demo_case,
            log,
            triggers=(self.build_trigger(affected_claims=("Coverage Claims",)),),
        )
        family = {cid for cid, c in demo_case.claims.items() if c.family == "Coverage Claims"}
        assert family <= set(update.stale_claims)

    def test_unknown_target(self, demo_case, tmp_path):
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        with pytest.raises(LifecycleError) as e:
            mark_stale(demo_case, log, triggers=(self.build_trigger(affected_claims=("9.9",)),))
        assert e.value.code == "UNKNOWN_CLAIM"

    def test_serialization_round_trip(self):
        trig = self.build_trigger()
        assert trigger_from_dict(trigger_to_dict(trig)) == trig

    def test_from_dict_requires_fields(self):
        with pytest.raises(LifecycleError) as e:
            trigger_from_dict({"id": "T1"})
        assert e.value.code == "BAD_TRIGGER"


class TestNoCalendarResets:
    def test_time_passing_changes_nothing(self, demo_case, tmp_path):
        """Staleness is event-driven; the diff of a case with itself is empty
        and marks nothing regardless of when it runs."""
        log = AssessmentLog(path=tmp_path / "log.jsonl")
        assess_all(demo_case, log)
        update = mark_stale(demo_case, log, diff_cases(demo_case, demo_case))
        assert update.stale_claims == () and update.worklist == ()
