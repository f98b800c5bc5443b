from __future__ import annotations

from datetime import date

import pytest

from casekit.errors import ModelError
from casekit.model import (
    CaseScope,
    Claim,
    ClaimStatus,
    CounterArgument,
    Evidence,
    EvidenceLink,
    SafetyCase,
    content_hash,
    traverse,
    validate_case,
)

SCOPE = CaseScope(
    system_description="Automated shuttle fleet",
    application="Campus loop service",
    environment="Private roads, daylight",
    assumptions=("Speeds capped at 25 km/h",),
)


def tiny_case(**overrides) -> SafetyCase:
    fields = dict(
        scope=SCOPE,
        claims=[
            Claim(id="1", text="The shuttle is acceptably safe.", children=("1.1",)),
            Claim(id="1.1", text="Braking performs within spec.", parent="1"),
        ],
        evidence=[
            Evidence(
                id="EV-1",
                title="Brake test report",
                kind="implementation",
                uri="docs/brake.pdf",
                created=date(2026, 1, 10),
            )
        ],
        links=[EvidenceLink(claim_id="1.1", evidence_id="EV-1")],
        version=1,
    )
    fields.update(overrides)
    return SafetyCase(**fields)


def codes(case: SafetyCase) -> list[str]:
    return [v.code for v in validate_case(case).violations]


class TestConstruction:
    def test_duplicate_claim_id_rejected(self):
        with pytest.raises(ModelError) as e:
            tiny_case(
                claims=[
                    Claim(id="1", text="a", children=("1.1",)),
                    Claim(id="1.1", text="b", parent="1"),
                    Claim(id="1.1", text="c", parent="1"),
                ]
            )
        assert e.value.code == "DUPLICATE_ID"

    def test_mapping_key_must_match_id(self):
        with pytest.raises(ModelError) as e:
            tiny_case(claims={"x": Claim(id="1", text="a")})
        assert e.value.code == "KEY_MISMATCH"

    def test_links_are_sorted(self):
        case = tiny_case(
            claims=[
                Claim(id="1", text="a", children=("1.1",)),
                Claim(id="1.1", text="b", parent="1"),
            ],
            evidence=[
                Evidence(id="EV-1", title="t", kind="procedural", uri="u", created=date(2026, 1, 1)),
                Evidence(id="EV-2", title="t", kind="procedural", uri="u", created=date(2026, 1, 1)),
            ],
            links=[
                EvidenceLink(claim_id="1.1", evidence_id="EV-2"),
                EvidenceLink(claim_id="1", evidence_id="EV-1"),
            ],
        )
        assert [(l.claim_id, l.evidence_id) for l in case.links] == [("1", "EV-1"), ("1.1", "EV-2")]

    def test_limitations_and_counter_arguments_get_canonical_order(self):
        a = Claim(id="1", text="t", limitations=("zebra", "alpha"))
        b = Claim(id="1", text="t", limitations=("alpha", "zebra"))
        assert a.limitations == b.limitations
        ca1 = CounterArgument(text="first", rejection="r")
        ca2 = CounterArgument(text="second", rejection="r")
        assert (
            Claim(id="1", text="t", counter_arguments=(ca1, ca2)).counter_arguments
            == Claim(id="1", text="t", counter_arguments=(ca2, ca1)).counter_arguments
        )

    def test_version_bump_helpers(self):
        case = tiny_case()
        grown = case.with_claim(Claim(id="1.2", text="New branch.", parent="1"))
        assert grown.version == case.version + 1
        assert "1.2" in grown.claims and "1.2" not in case.claims


class TestValidation:
    def test_tiny_case_is_clean(self):
        assert codes(tiny_case()) == []

    def test_empty_scope_field(self):
        case = tiny_case(scope=CaseScope(system_description=" ", application="a", environment="e"))
        assert "EMPTY_SCOPE_FIELD" in codes(case)

    def test_no_root(self):
        case = tiny_case(
            claims=[
                Claim(id="1", text="a", parent="1.1", children=("1.1",)),
                Claim(id="1.1", text="b", parent="1", children=("1",)),
            ],
            links=[],
        )
        assert "NO_ROOT" in codes(case)

    def test_multiple_roots(self):
        case = tiny_case(
            claims=[Claim(id="1", text="a"), Claim(id="2", text="b")],
            links=[],
        )
        assert "MULTIPLE_ROOTS" in codes(case)

    def test_empty_claim_text(self):
        case = tiny_case(
            claims=[
                Claim(id="1", text="a", children=("1.1",)),
                Claim(id="1.1", text="  ", parent="1"),
            ]
        )
        assert "EMPTY_CLAIM_TEXT" in codes(case)

    def test_unknown_parent_and_child(self):
        case = tiny_case(
            claims=[
                Claim(id="1", text="a", children=("1.1", "ghost")),
                Claim(id="1.1", text="b", parent="1"),
            ]
        )
        assert "UNKNOWN_CHILD" in codes(case)
        case = tiny_case(
            claims=[
                Claim(id="1", text="a", children=("1.1",)),
                Claim(id="1.1", text="b", parent="1"),
                Claim(id="1.2", text="c", parent="missing"),
            ]
        )
        assert "UNKNOWN_PARENT" in codes(case)

    def test_parent_child_mismatch(self):
        case = tiny_case(
            claims=[
                Claim(id="1", text="a", children=("1.1",)),
                Claim(id="1.1", text="b", parent="1"),
                Claim(id="1.2", text="c", parent="1"),  # parent does not list it
            ]
        )
        assert "PARENT_CHILD_MISMATCH" in codes(case)

    def test_missing_rejection_only_for_assessed(self):
        def with_status(status):
            return tiny_case(
                claims=[
                    Claim(id="1", text="a", children=("1.1",)),
                    Claim(
                        id="1.1",
                        text="b",
                        parent="1",
                        status=status,
                        counter_arguments=(CounterArgument(text="what about fog"),),
                    ),
                ]
            )

        assert "MISSING_REJECTION" in codes(with_status(ClaimStatus.ASSESSED))
        assert "MISSING_REJECTION" not in codes(with_status(ClaimStatus.DRAFTED))

    def test_dangling_rejection_evidence(self):
        case = tiny_case(
            claims=[
                Claim(id="1", text="a", children=("1.1",)),
                Claim(
                    id="1.1",
                    text="b",
                    parent="1",
                    counter_arguments=(
                        CounterArgument(text="c", rejection="r", rejection_evidence=("EV-404",)),
                    ),
                ),
            ]
        )
        assert "DANGLING_REJECTION_EVIDENCE" in codes(case)

    def test_cycle_detected(self):
        case = tiny_case(
            claims=[
                Claim(id="1", text="a", children=("1.1",)),
                Claim(id="1.1", text="b", parent="1", children=("1.1.1",)),
                Claim(id="1.1.1", text="c", parent="1.1.1", children=("1.1.1",)),
            ],
            links=[],
        )
        assert "CLAIM_CYCLE" in codes(case) or "PARENT_CHILD_MISMATCH" in codes(case)

    def test_dangling_link(self):
        case = tiny_case(links=[EvidenceLink(claim_id="nope", evidence_id="EV-1")])
        assert "DANGLING_LINK" in codes(case)

    def test_missing_evidence_cannot_carry_review_status(self):
        case = tiny_case(
            evidence=[
                Evidence(
                    id="EV-1",
                    title="t",
                    kind="procedural",
                    uri="u",
                    created=date(2026, 1, 1),
                    exists=False,
                    active_confirmed=True,
                )
            ],
            links=[],
        )
        assert "EVIDENCE_STATUS_CONFLICT" in codes(case)

    def test_review_before_created(self):
        case = tiny_case(
            evidence=[
                Evidence(
                    id="EV-1",
                    title="t",
                    kind="procedural",
                    uri="u",
                    created=date(2026, 1, 10),
                    last_review=date(2026, 1, 1),
                )
            ],
            links=[],
        )
        assert "REVIEW_BEFORE_CREATED" in codes(case)

    def test_violations_sorted_by_location_then_code(self, demo_case):
        case = tiny_case(
            claims=[
                Claim(id="1", text=" ", children=("1.1",)),
                Claim(id="1.1", text=" ", parent="1"),
            ]
        )
        report = validate_case(case)
        keys = [(v.location, v.code) for v in report.violations]
        assert keys == sorted(keys)


class TestTraversal:
    def test_demo_orders(self, demo_case):
        pre = traverse(demo_case, "pre")
        post = traverse(demo_case, "post")
        assert pre[0] == "1" and post[-1] == "1"
        assert sorted(pre) == sorted(post) == sorted(demo_case.claims)
        # children come after their parent in pre-order, before in post-order
        for cid in demo_case.claims:
            for child in demo_case.claims[cid].children:
                assert pre.index(child) > pre.index(cid)
                assert post.index(child) < post.index(cid)

    def test_ancestors(self, demo_case):
        assert demo_case.ancestors("1.1.2.2.1") == ("1.1.2.2", "1.1.2", "1.1", "1")
        assert demo_case.ancestors("1") == ()

    def test_linked_views(self, demo_case):
        assert "EV-HAZ-1" in demo_case.linked_evidence("1.1.1.1")
        assert set(demo_case.linked_claims("EV-HAZ-1")) == {"1.1.1.1", "1.1.2.1.1"}


class TestContentHash:
    def test_text_changes_hash(self):
        a = Claim(id="1", text="original")
        b = Claim(id="1", text="edited")
        assert content_hash(a) != content_hash(b)

    def test_status_and_poc_do_not(self):
        a = Claim(id="1", text="t", poc="Rowan Ellis", status=ClaimStatus.DRAFTED)
        b = Claim(id="1", text="t", poc="Mei Tanaka", status=ClaimStatus.NARRATED)
        assert content_hash(a) == content_hash(b)

    def test_evidence_review_metadata_ignored(self):
        a = Evidence(id="E", title="t", kind="procedural", uri="u", created=date(2026, 1, 1))
        b = Evidence(
            id="E",
            title="t",
            kind="procedural",
            uri="u",
            created=date(2026, 1, 1),
            last_review=date(2026, 2, 1),
            active_confirmed=True,
        )
        assert content_hash(a) == content_hash(b)
        c = Evidence(id="E", title="other", kind="procedural", uri="u", created=date(2026, 1, 1))
        assert content_hash(a) != content_hash(c)
