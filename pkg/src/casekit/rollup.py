"""Score aggregation over the claim tree.

Effective values are computed per dimension, bottom-up, in exact rational
arithmetic. A leaf's effective value is its direct score. An internal claim
combines its children's effective values together with its own direct score
when one exists; combining is either the minimum (conservative default) or a
weighted arithmetic mean. Not-applicable dimensions simply contribute
nothing.

Overrides let a reviewer assert branch-level acceptability: an override
replaces one claim's effective value but never reaches into its children and
never launders the low-score register, which is always computed from direct
assessments alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from fractions import Fraction
from typing import Mapping

from .errors import RollupError
from .model import SafetyCase, traverse
from .assessment import DIMENSIONS, IMPLEMENTATION, PROCEDURAL, ClaimAssessment

CONSERVATIVE_MIN = "conservative_min"
WEIGHTED_MEAN = "weighted_mean"
STRATEGIES = (CONSERVATIVE_MIN, WEIGHTED_MEAN)

SOURCE_DIRECT = "direct"
SOURCE_CHILDREN = "children"
SOURCE_MIXED = "mixed"
SOURCE_OVERRIDE = "override"


@dataclass(frozen=True)
class Weighting:
    """Per-child weights used by the weighted-mean combine at one parent.

    Weights are non-negative and are normalized over the children that
    actually contribute. Anything other than a uniform weighting must state
    why.
    """

    weights: Mapping[str, Fraction]
    rationale: str | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "weights", {k: _as_fraction(v, f"weight for {k!r}") for k, v in dict(self.weights).items()}
        )


@dataclass(frozen=True)
class Override:
    claim_id: str
    dimension: str
    value: int
    rationale: str
    author: str
    decided_at: date


@dataclass(frozen=True)
class RegisterEntry:
    claim_id: str
    dimension: str
    score: int


@dataclass(frozen=True)
class RollupNode:
    claim_id: str
    procedural: Fraction | None
    implementation: Fraction | None
    source: str
    contributing_children: tuple[str, ...] = ()
    overridden_dimensions: tuple[str, ...] = ()

    def value(self, dimension: str) -> Fraction | None:
        return self.procedural if dimension == PROCEDURAL else self.implementation


@dataclass(frozen=True)
class RollupResult:
    case_version: int
    strategy: str
    threshold: int
    nodes: dict[str, RollupNode]
    low_score_register: tuple[RegisterEntry, ...]
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Spoke:
    family: str
    procedural: Fraction | None
    implementation: Fraction | None


@dataclass(frozen=True)
class RadarData:
    """Per-family spoke values on the 0-3 scale, in first-occurrence order."""

    spokes: tuple[Spoke, ...]
    scale_max: int = 3


def rollup(
    case: SafetyCase,
    assessments: Mapping[str, ClaimAssessment],
    strategy: str = CONSERVATIVE_MIN,
    weights: Mapping[str, Weighting] | None = None,
    overrides: tuple[Override, ...] = (),
    threshold: int = 2,
) -> RollupResult:
    """Compute effective values for every claim plus the low-score register."""
    if strategy not in STRATEGIES:
        raise RollupError(f"unknown strategy {strategy!r}", code="UNKNOWN_STRATEGY")
    weights = dict(weights or {})
    _check_weights(case, weights)
    override_map = _check_overrides(case, overrides)

    warnings: list[str] = []
    usable: dict[str, ClaimAssessment] = {}
    for claim_id, rec in sorted(assessments.items()):
        if claim_id not in case.claims:
            warnings.append(f"assessment for unknown claim {claim_id!r} ignored")
            continue
        if rec.case_version != case.version:
            warnings.append(
                f"assessment of {claim_id} pins case version {rec.case_version}, "
                f"current is {case.version}; excluded"
            )
            continue
        if rec.stale:
            warnings.append(f"assessment of {claim_id} is stale; excluded")
            continue
        usable[claim_id] = rec

    order = traverse(case, "post")
    values: dict[str, dict[str, Fraction | None]] = {}
    nodes: dict[str, RollupNode] = {}
    for claim_id in order:
        claim = case.claims[claim_id]
        rec = usable.get(claim_id)
        per_dim: dict[str, Fraction | None] = {}
        kinds: set[str] = set()
        contributors: set[str] = set()
        for dim in DIMENSIONS:
            contributions: list[tuple[str, Fraction]] = []
            for child in claim.children:
                child_value = values[child][dim]
                if child_value is not None:
                    contributions.append((child, child_value))
                    contributors.add(child)
                    kinds.add(SOURCE_CHILDREN)
            if rec is not None and not rec.is_na(dim) and rec.score(dim) is not None:
                contributions.append((claim_id, Fraction(rec.score(dim))))
                kinds.add(SOURCE_DIRECT)
            if not contributions:
                per_dim[dim] = None
                warnings.append(f"no {dim} contribution at {claim_id}")
            elif strategy == CONSERVATIVE_MIN:
                per_dim[dim] = min(v for _, v in contributions)
            else:
                per_dim[dim] = _weighted_mean(contributions, weights.get(claim_id), claim_id)
        overridden: list[str] = []
        for dim in DIMENSIONS:
            ov = override_map.get((claim_id, dim))
            if ov is not None:
                per_dim[dim] = Fraction(ov.value)
                overridden.append(dim)
        if len(kinds) == 2:
            warnings.append(f"{claim_id} combines a direct score with child values")
        source = (
            SOURCE_OVERRIDE
            if overridden
            else SOURCE_MIXED
            if len(kinds) == 2
            else SOURCE_DIRECT
            if kinds == {SOURCE_DIRECT}
            else SOURCE_CHILDREN
            if kinds == {SOURCE_CHILDREN}
            else SOURCE_DIRECT  # no contributions at all; nothing flowed in
        )
        values[claim_id] = per_dim
        nodes[claim_id] = RollupNode(
            claim_id=claim_id,
            procedural=per_dim[PROCEDURAL],
            implementation=per_dim[IMPLEMENTATION],
            source=source,
            contributing_children=tuple(c for c in claim.children if c in contributors),
            overridden_dimensions=tuple(overridden),
        )

    register = tuple(
        RegisterEntry(claim_id=claim_id, dimension=dim, score=rec.score(dim))
        for claim_id, rec in sorted(usable.items())
        for dim in DIMENSIONS
        if not rec.is_na(dim) and rec.score(dim) is not None and rec.score(dim) < threshold
    )
    return RollupResult(
        case_version=case.version,
        strategy=strategy,
        threshold=threshold,
        nodes=nodes,
        low_score_register=register,
        warnings=tuple(warnings),
    )


def spoke_values(case: SafetyCase, result: RollupResult) -> RadarData:
    """Combine effective values per claim family using the roll-up strategy.

    Spokes appear in pre-order first-occurrence order of their family tag.
    Families whose claims carry no effective value in either dimension are
    dropped; a case with no family tags at all cannot be charted.
    """
    order = traverse(case, "pre")
    families: list[str] = []
    members: dict[str, list[str]] = {}
    for claim_id in order:
        family = case.claims[claim_id].family
        if family is None:
            continue
        if family not in members:
            families.append(family)
            members[family] = []
        members[family].append(claim_id)
    if not families:
        raise RollupError("no claim carries a family tag; nothing to chart", code="NO_FAMILIES")

    spokes = []
    for family in families:
        per_dim: dict[str, Fraction | None] = {}
        for dim in DIMENSIONS:
            found = [
                result.nodes[claim_id].value(dim)
                for claim_id in members[family]
                if claim_id in result.nodes and result.nodes[claim_id].value(dim) is not None
            ]
            if not found:
                per_dim[dim] = None
            elif result.strategy == CONSERVATIVE_MIN:
                per_dim[dim] = min(found)
            else:
                per_dim[dim] = sum(found, Fraction(0)) / len(found)
        if per_dim[PROCEDURAL] is None and per_dim[IMPLEMENTATION] is None:
            continue
        spokes.append(Spoke(family=family, procedural=per_dim[PROCEDURAL], implementation=per_dim[IMPLEMENTATION]))
    if not spokes:
        raise RollupError("no family has an effective value to chart", code="NO_FAMILIES")
    return RadarData(spokes=tuple(spokes))


def _weighted_mean(
    contributions: list[tuple[str, Fraction]], weighting: Weighting | None, claim_id: str
) -> Fraction:
    n = len(contributions)
    explicit = weighting.weights if weighting is not None else {}
    # a contributor without an explicit weight gets a uniform share before
    # normalization; in particular the claim's own direct score
    pairs = [(explicit.get(source, Fraction(1, n)), value) for source, value in contributions]
    total = sum(w for w, _ in pairs)
    if total == 0:
        raise RollupError(
            f"weights at {claim_id} zero out every contribution", code="ZERO_WEIGHTS", location=claim_id
        )
    return sum(w * v for w, v in pairs) / total


def _check_weights(case: SafetyCase, weights: Mapping[str, Weighting]) -> None:
    for claim_id, weighting in sorted(weights.items()):
        if claim_id not in case.claims:
            raise RollupError(f"weights reference unknown claim {claim_id!r}", code="UNKNOWN_CLAIM", location=claim_id)
        children = set(case.claims[claim_id].children)
        for target, w in weighting.weights.items():
            if target not in children:
                raise RollupError(
                    f"weight target {target!r} is not a child of {claim_id!r}",
                    code="WEIGHT_NOT_A_CHILD",
                    location=claim_id,
                )
            if w < 0:
                raise RollupError(f"negative weight for {target!r}", code="NEGATIVE_WEIGHT", location=claim_id)
        distinct = set(weighting.weights.values())
        if len(distinct) > 1 and not (weighting.rationale or "").strip():
            raise RollupError(
                f"non-uniform weights at {claim_id!r} need a rationale",
                code="WEIGHTS_WITHOUT_RATIONALE",
                location=claim_id,
            )


def _check_overrides(case: SafetyCase, overrides: tuple[Override, ...]) -> dict[tuple[str, str], Override]:
    override_map: dict[tuple[str, str], Override] = {}
    for ov in overrides:
        if ov.claim_id not in case.claims:
            raise RollupError(f"override targets unknown claim {ov.claim_id!r}", code="UNKNOWN_CLAIM", location=ov.claim_id)
        if ov.dimension not in DIMENSIONS:
            raise RollupError(f"override names unknown dimension {ov.dimension!r}", code="UNKNOWN_DIMENSION")
        if not 0 <= ov.value <= 3:
            raise RollupError(f"override value must be 0..3, got {ov.value}", code="BAD_LEVEL", location=ov.claim_id)
        if not ov.rationale.strip():
            raise RollupError(
                f"override at {ov.claim_id!r} needs a rationale", code="OVERRIDE_WITHOUT_RATIONALE", location=ov.claim_id
            )
        poc = case.claims[ov.claim_id].poc
        if poc is not None and ov.author == poc:
            raise RollupError(
                f"override at {ov.claim_id!r} cannot be authored by the claim's point of contact",
                code="SELF_OVERRIDE",
                location=ov.claim_id,
            )
        key = (ov.claim_id, ov.dimension)
        if key in override_map:
            raise RollupError(
                f"duplicate override for {ov.claim_id!r} {ov.dimension}", code="DUPLICATE_OVERRIDE", location=ov.claim_id
            )
        override_map[key] = ov
    return override_map


def _as_fraction(value, what: str) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise RollupError(f"{what} is not a rational number: {value!r}", code="BAD_WEIGHT") from exc
