"""Contextualized proposal ranking for a single issue.

Detector outputs are combined into base scores (reference hits contribute a
flat 1.0, duplicate hits their cosine score), pairs that already exist or
were rejected are filtered out, and the survivors are multiplied by the
user's depth / orphan / property factors. Ranked scores are unbounded above
and separate from the stored dependency confidence in [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .dupdetect import DuplicateProposal
from .graph import IssueGraph, distance
from .model import UnknownIssueError, ValidationError
from .refdetect import ReferenceProposal

REFERENCE_BASE_SCORE = 1.0


@dataclass(frozen=True)
class PropertyRule:
    name: str
    value: str
    factor: float


@dataclass
class ContextParams:
    min_depth: int = 5
    f_depth: float = 1.0
    f_orphan: float = 1.0
    properties: list[PropertyRule] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.f_depth <= 0 or self.f_orphan <= 0:
            raise ValidationError("factors must be positive")
        for rule in self.properties:
            if rule.factor <= 0:
                raise ValidationError(f"factor must be positive: {rule}")


@dataclass
class RankedProposal:
    from_key: str
    to_key: str
    base_score: float
    ranked_score: float = 0.0
    origins: set[str] = field(default_factory=set)
    applied_factors: list[tuple[str, float]] = field(default_factory=list)

    @property
    def pair(self) -> tuple[str, str]:
        a, b = self.from_key, self.to_key
        return (a, b) if a <= b else (b, a)


def combine(
    refs: list[ReferenceProposal],
    dups: list[DuplicateProposal],
    r0: str,
) -> list[RankedProposal]:
    """Aggregate detector hits for r0. Each target appears once; the base
    score is the sum of the reference default (1.0) and the cosine score."""
    merged: dict[str, RankedProposal] = {}
    for ref in refs:
        target = _other_endpoint(ref.from_key, ref.to_key, r0)
        if target is None:
            continue
        prop = merged.setdefault(
            target, RankedProposal(from_key=r0, to_key=target, base_score=0.0)
        )
        if "reference" not in prop.origins:
            prop.origins.add("reference")
            prop.base_score += REFERENCE_BASE_SCORE
    for dup in dups:
        target = _other_endpoint(dup.a, dup.b, r0)
        if target is None:
            continue
        prop = merged.setdefault(
            target, RankedProposal(from_key=r0, to_key=target, base_score=0.0)
        )
        if "duplicate" not in prop.origins:
            prop.origins.add("duplicate")
            prop.base_score += dup.score
    out = sorted(merged.values(), key=lambda p: p.to_key)
    for prop in out:
        prop.ranked_score = prop.base_score
    return out


def _other_endpoint(a: str, b: str, r0: str) -> str | None:
    if a == r0 and b != r0:
        return b
    if b == r0 and a != r0:
        return a
    return None


def contextualize(
    r0: str,
    cands: list[RankedProposal],
    g: IssueGraph,
    existing: set[tuple[str, str]],
    rejected: set[tuple[str, str]],
    params: ContextParams,
) -> list[RankedProposal]:
    """Filter known pairs and apply the ranking factors of the query.

    Distance greater than min_depth triggers the depth factor; unreachable
    targets (other components, unknown keys) count as infinitely far, so
    orphan targets collect both the depth and the orphan factor.
    """
    if r0 not in g.issues:
        raise UnknownIssueError(r0)
    ranked: list[RankedProposal] = []
    for cand in cands:
        if cand.pair in existing or cand.pair in rejected:
            continue
        score = cand.base_score
        applied: list[tuple[str, float]] = []
        if distance(g, r0, cand.to_key) > params.min_depth:
            score *= params.f_depth
            applied.append(("depth", params.f_depth))
        target = g.issues.get(cand.to_key)
        if target is not None and g.is_orphan(cand.to_key):
            score *= params.f_orphan
            applied.append(("orphan", params.f_orphan))
        for rule in params.properties:
            if target is not None and target.property_value(rule.name) == rule.value:
                score *= rule.factor
                applied.append((f"{rule.name}={rule.value}", rule.factor))
        ranked.append(
            RankedProposal(
                from_key=cand.from_key,
                to_key=cand.to_key,
                base_score=cand.base_score,
                ranked_score=score,
                origins=set(cand.origins),
                applied_factors=applied,
            )
        )
    ranked.sort(key=lambda p: (-p.ranked_score, p.from_key, p.to_key))
    return ranked


def proposals_for(
    r0: str,
    g: IssueGraph,
    refs: list[ReferenceProposal],
    dups: list[DuplicateProposal],
    existing: set[tuple[str, str]],
    rejected: set[tuple[str, str]],
    params: ContextParams,
) -> list[RankedProposal]:
    """Full query path: restrict detector output to r0, combine, contextualize."""
    refs_r0 = [p for p in refs if r0 in (p.from_key, p.to_key)]
    dups_r0 = [p for p in dups if r0 in (p.a, p.b)]
    return contextualize(
        r0, combine(refs_r0, dups_r0, r0), g, existing, rejected, params
    )
