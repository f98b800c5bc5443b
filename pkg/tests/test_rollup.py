from __future__ import annotations

import random
from datetime import date
from fractions import Fraction

import pytest

from casekit.assessment import ClaimAssessment
from casekit.errors import RollupError
from casekit.model import CaseScope, Claim, SafetyCase
from casekit.rollup import (
    CONSERVATIVE_MIN,
    WEIGHTED_MEAN,
    Override,
    Weighting,
    rollup,
    spoke_values,
)

from gencase import (
    direct_map,
    overrides_for_oracle,
    random_assessments,
    random_case,
    random_overrides,
    random_weights,
    tree_map,
    weights_for_oracle,
)
from oracles import oracle_effective, oracle_register


def build_case(tree: dict[str, tuple[str, ...]], families: dict[str, str] | None = None) -> SafetyCase:
    families = families or {}
    parents = {child: pid for pid, kids in tree.items() for child in kids}
    return SafetyCase(
        scope=CaseScope(system_description="s", application="a", environment="e"),
        claims=[
            Claim(
                id=cid,
                text=f"Claim {cid}.",
                parent=parents.get(cid),
                children=tree[cid],
                family=families.get(cid),
            )
            for cid in tree
        ],
        evidence=[],
        links=[],
        version=1,
    )


def assess(case: SafetyCase, scores: dict[str, tuple[int | None, int | None]]):
    out = {}
    for cid, (proc, impl) in scores.items():
        out[cid] = ClaimAssessment(
            claim_id=cid,
            summary=f"Assessment of {cid}.",
            assessor=("Quinn Vo",),
            assessed_at=date(2026, 2, 1),
            case_version=case.version,
            procedural=proc,
            implementation=impl,
            procedural_na=proc is None,
            implementation_na=impl is None,
            na_justification="not applicable here" if proc is None or impl is None else None,
        )
    return out


TREE = {"1": ("1.1", "1.2"), "1.1": (), "1.2": ()}


class TestCombine:
    def test_min_of_children(self):
        case = build_case(TREE)
        recs = assess(case, {"1.1": (3, 3), "1.2": (1, 2)})
        res = rollup(case, recs, strategy=CONSERVATIVE_MIN)
        root = res.nodes["1"]
        assert (root.procedural, root.implementation) == (1, 2)
        assert root.source == "children"
        assert root.contributing_children == ("1.1", "1.2")

    def test_identical_children_same_under_both(self):
        case = build_case(TREE)
        recs = assess(case, {"1.1": (2, 2), "1.2": (2, 2)})
        for strategy in (CONSERVATIVE_MIN, WEIGHTED_MEAN):
            res = rollup(case, recs, strategy=strategy)
            assert (res.nodes["1"].procedural, res.nodes["1"].implementation) == (2, 2)

    def test_documented_weighted_mean(self):
        case = build_case(TREE)
        recs = assess(case, {"1.1": (3, 3), "1.2": (1, 3)})
        weights = {
            "1": Weighting(
                weights={"1.1": Fraction(3, 4), "1.2": Fraction(1, 4)},
                rationale="sub-claim 1.1 carries most of the argument",
            )
        }
        res = rollup(case, recs, strategy=WEIGHTED_MEAN, weights=weights)
        assert res.nodes["1"].procedural == Fraction(5, 2)

    def test_mean_keeps_exact_fractions(self):
        case = build_case(TREE)
        recs = assess(case, {"1.1": (3, 1), "1.2": (2, 1)})
        res = rollup(case, recs, strategy=WEIGHTED_MEAN)
        assert res.nodes["1"].procedural == Fraction(5, 2)
        assert isinstance(res.nodes["1"].procedural, Fraction)

    def test_direct_score_joins_children(self):
        case = build_case(TREE)
        recs = assess(case, {"1": (1, 3), "1.1": (3, 3), "1.2": (3, 3)})
        res = rollup(case, recs, strategy=CONSERVATIVE_MIN)
        assert res.nodes["1"].procedural == 1  # own direct score dominates
        assert res.nodes["1"].source == "mixed"
        assert any("combines a direct score" in w for w in res.warnings)

    def test_na_dimension_contributes_nothing(self):
        case = build_case(TREE)
        recs = assess(case, {"1.1": (2, None), "1.2": (3, 1)})
        res = rollup(case, recs)
        assert res.nodes["1"].implementation == 1  # only 1.2 contributes
        assert res.nodes["1.1"].implementation is None

    def test_uncovered_node_warns(self):
        case = build_case(TREE)
        recs = assess(case, {"1.2": (2, 2)})
        res = rollup(case, recs)
        assert res.nodes["1.1"].procedural is None
        assert any("no procedural contribution at 1.1" in w for w in res.warnings)

    def test_unknown_strategy(self):
        case = build_case(TREE)
        with pytest.raises(RollupError) as e:
            rollup(case, {}, strategy="median")
        assert e.value.code == "UNKNOWN_STRATEGY"


class TestExclusions:
    def test_version_mismatch_excluded_with_warning(self):
        case = build_case(TREE)
        recs = assess(case, {"1.1": (3, 3), "1.2": (1, 1)})
        stale_rec = recs["1.2"]
        object.__setattr__(stale_rec, "case_version", 99)
        res = rollup(case, recs)
        assert res.nodes["1.2"].procedural is None
        assert any("pins case version 99" in w for w in res.warnings)
        # the register must not include the excluded record either
        assert all(e.claim_id != "1.2" for e in res.low_score_register)

    def test_stale_excluded_with_warning(self):
        case = build_case(TREE)
        recs = assess(case, {"1.1": (3, 3), "1.2": (0, 0)})
        object.__setattr__(recs["1.2"], "stale", True)
        res = rollup(case, recs)
        assert res.nodes["1.2"].procedural is None
        assert any("stale" in w for w in res.warnings)

    def test_unknown_claim_ignored_with_warning(self):
        case = build_case(TREE)
        recs = assess(case, {"1.1": (2, 2), "1.2": (2, 2)})
        ghost = assess(case, {"1.1": (1, 1)})["1.1"]
        object.__setattr__(ghost, "claim_id", "9.9")
        recs["9.9"] = ghost
        res = rollup(case, recs)
        assert any("unknown claim" in w for w in res.warnings)
        assert "9.9" not in res.nodes


class TestWeightsValidation:
    def setup_method(self):
        self.case = build_case(TREE)
        self.recs = assess(self.case, {"1.1": (2, 2), "1.2": (2, 2)})

    def test_weight_for_non_child(self):
        weights = {"1": Weighting(weights={"1.9": Fraction(1)}, rationale="r")}
        with pytest.raises(RollupError) as e:
            rollup(self.case, self.recs, strategy=WEIGHTED_MEAN, weights=weights)
        assert e.value.code == "WEIGHT_NOT_A_CHILD"

    def test_weight_for_unknown_claim(self):
        weights = {"404": Weighting(weights={"1.1": Fraction(1)}, rationale="r")}
        with pytest.raises(RollupError) as e:
            rollup(self.case, self.recs, strategy=WEIGHTED_MEAN, weights=weights)
        assert e.value.code == "UNKNOWN_CLAIM"

    def test_negative_weight(self):
        weights = {"1": Weighting(weights={"1.1": Fraction(-1)}, rationale="r")}
        with pytest.raises(RollupError) as e:
            rollup(self.case, self.recs, strategy=WEIGHTED_MEAN, weights=weights)
        assert e.value.code == "NEGATIVE_WEIGHT"

    def test_non_uniform_needs_rationale(self):
        weights = {"1": Weighting(weights={"1.1": Fraction(2), "1.2": Fraction(1)})}
        with pytest.raises(RollupError) as e:
            rollup(self.case, self.recs, strategy=WEIGHTED_MEAN, weights=weights)
        assert e.value.code == "WEIGHTS_WITHOUT_RATIONALE"

    def test_uniform_weights_need_no_rationale(self):
        weights = {"1": Weighting(weights={"1.1": Fraction(1), "1.2": Fraction(1)})}
        res = rollup(self.case, self.recs, strategy=WEIGHTED_MEAN, weights=weights)
        assert res.nodes["1"].procedural == 2

    def test_all_zero_weights(self):
        weights = {
            "1": Weighting(weights={"1.1": Fraction(0), "1.2": Fraction(0)}, rationale="r")
        }
        with pytest.raises(RollupError) as e:
            rollup(self.case, self.recs, strategy=WEIGHTED_MEAN, weights=weights)
        assert e.value.code == "ZERO_WEIGHTS"


def override(claim_id="1", dimension="procedural", value=2, **kw):
    fields = dict(
        claim_id=claim_id,
        dimension=dimension,
        value=value,
        rationale="branch accepted after panel review",
        author="Panel Lead",
        decided_at=date(2026, 2, 2),
    )
    fields.update(kw)
    return Override(**fields)


class TestOverrides:
    def setup_method(self):
        self.case = build_case(TREE)

    def test_override_replaces_node_not_children(self):
        recs = assess(self.case, {"1.1": (0, 0), "1.2": (3, 3)})
        res = rollup(self.case, recs, overrides=(override(value=2),))
        assert res.nodes["1"].procedural == 2
        assert res.nodes["1"].source == "override"
        assert res.nodes["1"].overridden_dimensions == ("procedural",)
        assert res.nodes["1.1"].procedural == 0  # child untouched

    def test_register_is_override_proof(self):
        recs = assess(self.case, {"1.1": (0, 1), "1.2": (3, 3)})
        plain = rollup(self.case, recs)
        overridden = rollup(
            self.case,
            recs,
            overrides=(override(claim_id="1.1", value=3), override(value=3)),
        )
        assert plain.low_score_register == overridden.low_score_register
        entries = [(e.claim_id, e.dimension, e.score) for e in overridden.low_score_register]
        assert entries == [("1.1", "procedural", 0), ("1.1", "implementation", 1)]

    def test_ancestors_see_overridden_value(self):
        tree = {"1": ("1.1",), "1.1": ("1.1.1",), "1.1.1": ()}
        case = build_case(tree)
        recs = assess(case, {"1.1.1": (0, 0)})
        res = rollup(case, recs, overrides=(override(claim_id="1.1", value=3),))
        assert res.nodes["1.1"].procedural == 3
        assert res.nodes["1"].procedural == 3

    def test_override_without_rationale(self):
        with pytest.raises(RollupError) as e:
            rollup(self.case, {}, overrides=(override(rationale="  "),))
        assert e.value.code == "OVERRIDE_WITHOUT_RATIONALE"

    def test_override_unknown_claim_dimension_level(self):
        for bad, code in (
            (override(claim_id="404"), "UNKNOWN_CLAIM"),
            (override(dimension="vibes"), "UNKNOWN_DIMENSION"),
            (override(value=7), "BAD_LEVEL"),
        ):
            with pytest.raises(RollupError) as e:
                rollup(self.case, {}, overrides=(bad,))
            assert e.value.code == code

    def test_duplicate_override(self):
        with pytest.raises(RollupError) as e:
            rollup(self.case, {}, overrides=(override(), override(value=1)))
        assert e.value.code == "DUPLICATE_OVERRIDE"

    def test_self_override_blocked(self):
        case = build_case(TREE)
        claims = dict(case.claims)
        claims["1"] = Claim(id="1", text="t", children=("1.1", "1.2"), poc="Panel Lead")
        case = SafetyCase(scope=case.scope, claims=claims, evidence=[], links=[], version=1)
        with pytest.raises(RollupError) as e:
            rollup(case, {}, overrides=(override(),))
        assert e.value.code == "SELF_OVERRIDE"


class TestSpokes:
    def test_family_min_and_order(self):
        tree = {"1": ("1.1", "1.2", "1.3"), "1.1": (), "1.2": (), "1.3": ()}
        case = build_case(
            tree,
            families={"1.1": "Coverage Claims", "1.2": "Coverage Claims", "1.3": "Confidence Claims"},
        )
        recs = assess(case, {"1.1": (2, 2), "1.2": (3, 2), "1.3": (1, 1)})
        radar = spoke_values(case, rollup(case, recs))
        assert [s.family for s in radar.spokes] == ["Coverage Claims", "Confidence Claims"]
        cov = radar.spokes[0]
        assert (cov.procedural, cov.implementation) == (2, 2)
        assert radar.scale_max == 3

    def test_single_claim_family_equals_its_effective(self):
        tree = {"1": ("1.1",), "1.1": ()}
        case = build_case(tree, families={"1.1": "Only"})
        recs = assess(case, {"1.1": (3, 1)})
        radar = spoke_values(case, rollup(case, recs))
        assert (radar.spokes[0].procedural, radar.spokes[0].implementation) == (3, 1)

    def test_no_families_is_an_error(self):
        case = build_case(TREE)
        recs = assess(case, {"1.1": (2, 2)})
        with pytest.raises(RollupError) as e:
            spoke_values(case, rollup(case, recs))
        assert e.value.code == "NO_FAMILIES"

    def test_demo_spokes(self, demo_case, demo_current):
        radar = spoke_values(demo_case, rollup(demo_case, demo_current))
        by_family = {s.family: (s.procedural, s.implementation) for s in radar.spokes}
        assert by_family == {
            "Reasonableness of acceptance criterion": (2, 1),
            "The methodology provides credible evidence for criterion evaluation": (2, 1),
            "Coverage Claims": (2, 2),
            "Confidence Claims": (2, 1),
        }


class TestAgainstOracle:
    def test_small_instances_exact(self):
        for seed in range(120):
            rng = random.Random(7_000 + seed)
            case = random_case(rng, max_claims=12)
            recs = random_assessments(rng, case)
            weights = random_weights(rng, case)
            overrides = random_overrides(rng, case)
            for strategy in (CONSERVATIVE_MIN, WEIGHTED_MEAN):
                res = rollup(case, recs, strategy=strategy, weights=weights, overrides=overrides)
                want = oracle_effective(
                    tree_map(case),
                    case.root_id(),
                    direct_map(recs),
                    strategy,
                    weights=weights_for_oracle(weights),
                    overrides=overrides_for_oracle(overrides),
                )
                for cid, node in res.nodes.items():
                    assert node.procedural == want[cid]["procedural"], (seed, strategy, cid)
                    assert node.implementation == want[cid]["implementation"], (seed, strategy, cid)
                got_reg = [(e.claim_id, e.dimension, e.score) for e in res.low_score_register]
                assert got_reg == oracle_register(direct_map(recs), 2)
