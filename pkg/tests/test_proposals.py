import random

import pytest

from helpers import dep, graph_of, issue, norm_pair, rank_proposals_oracle
from issuedeps.dupdetect import DuplicateProposal
from issuedeps.generate import build_random_graph
from issuedeps.graph import build_graph
from issuedeps.model import UnknownIssueError, ValidationError
from issuedeps.proposals import (
    ContextParams,
    PropertyRule,
    RankedProposal,
    combine,
    contextualize,
)
from issuedeps.refdetect import ReferenceProposal


def ref(a, b):
    return ReferenceProposal(from_key=a, to_key=b, source_field="title", matched_text=b)


def dup(a, b, score):
    return DuplicateProposal(a=a, b=b, score=score)


def cand(r0, target, base):
    return RankedProposal(from_key=r0, to_key=target, base_score=base, ranked_score=base)


# ---------------------------------------------------------------------------
# combine
# ---------------------------------------------------------------------------


def test_combine_reference_only_scores_one():
    [p] = combine([ref("A-1", "A-2")], [], "A-1")
    assert p.base_score == 1.0
    assert p.origins == {"reference"}


def test_combine_duplicate_only_keeps_cosine():
    [p] = combine([], [dup("A-1", "A-2", 0.87)], "A-1")
    assert p.base_score == pytest.approx(0.87)
    assert p.origins == {"duplicate"}


def test_combine_both_sums():
    [p] = combine([ref("A-1", "A-2")], [dup("A-2", "A-1", 0.87)], "A-1")
    assert p.base_score == pytest.approx(1.87)
    assert p.origins == {"reference", "duplicate"}


def test_combine_never_proposes_twice():
    out = combine(
        [ref("A-1", "A-2"), ref("A-2", "A-1")],
        [dup("A-1", "A-2", 0.5)],
        "A-1",
    )
    assert len(out) == 1
    assert out[0].base_score == pytest.approx(1.5)


def test_combine_ignores_pairs_not_involving_center():
    out = combine([ref("B-1", "B-2")], [dup("B-2", "B-3", 0.9)], "A-1")
    assert out == []


# ---------------------------------------------------------------------------
# contextualize
# ---------------------------------------------------------------------------


def ctx_graph():
    issues = [issue(f"A-{i}") for i in range(1, 10)]
    deps = [
        dep("A-1", "A-2"),
        dep("A-2", "A-3"),
        dep("A-3", "A-4"),
        dep("A-4", "A-5"),
        dep("A-5", "A-6"),
        dep("A-6", "A-7"),
        dep("A-7", "A-8"),
    ]
    # A-9 stays an orphan
    return graph_of(issues, deps)


def test_existing_pair_filtered():
    g = ctx_graph()
    out = contextualize(
        "A-1",
        [cand("A-1", "A-2", 0.9)],
        g,
        existing={norm_pair("A-1", "A-2")},
        rejected=set(),
        params=ContextParams(),
    )
    assert out == []


def test_rejected_pair_filtered():
    g = ctx_graph()
    out = contextualize(
        "A-1",
        [cand("A-1", "A-2", 0.9)],
        g,
        existing=set(),
        rejected={norm_pair("A-2", "A-1")},
        params=ContextParams(),
    )
    assert out == []


def test_depth_factor_applied_beyond_min_depth():
    g = ctx_graph()
    params = ContextParams(min_depth=5, f_depth=2.0)
    [far] = contextualize(
        "A-1", [cand("A-1", "A-8", 0.5)], g, set(), set(), params
    )
    assert far.ranked_score == pytest.approx(1.0)  # distance 7 > 5
    assert far.applied_factors == [("depth", 2.0)]
    [near] = contextualize(
        "A-1", [cand("A-1", "A-4", 0.5)], g, set(), set(), params
    )
    assert near.ranked_score == pytest.approx(0.5)
    assert near.applied_factors == []


def test_orphan_gets_depth_and_orphan_factor():
    # an orphan target is infinitely far, so both multipliers fire
    g = ctx_graph()
    params = ContextParams(min_depth=5, f_depth=2.0, f_orphan=3.0)
    [p] = contextualize("A-1", [cand("A-1", "A-9", 0.5)], g, set(), set(), params)
    assert p.ranked_score == pytest.approx(0.5 * 2.0 * 3.0)
    assert p.applied_factors == [("depth", 2.0), ("orphan", 3.0)]


def test_property_factor():
    issues = [issue("A-1"), issue("QTBUG-9")]
    g = build_graph(issues, [])
    params = ContextParams(
        min_depth=5,
        f_depth=1.0,
        f_orphan=1.0,
        properties=[PropertyRule("project", "QTBUG", 1.5)],
    )
    [p] = contextualize("A-1", [cand("A-1", "QTBUG-9", 0.5)], g, set(), set(), params)
    assert p.ranked_score == pytest.approx(0.75)


def test_demotion_factor_never_outranks():
    issues = [issue("A-1"), issue("QTBUG-2"), issue("OTHER-2")]
    g = build_graph(issues, [])
    params = ContextParams(
        properties=[PropertyRule("project", "QTBUG", 0.5)], min_depth=50
    )
    out = contextualize(
        "A-1",
        [cand("A-1", "QTBUG-2", 0.9), cand("A-1", "OTHER-2", 0.9)],
        g,
        set(),
        set(),
        params,
    )
    assert [p.to_key for p in out] == ["OTHER-2", "QTBUG-2"]


def test_factor_neutrality_preserves_base_order():
    g = ctx_graph()
    cands = [cand("A-1", "A-8", 0.2), cand("A-1", "A-4", 0.9), cand("A-1", "A-9", 0.5)]
    out = contextualize("A-1", cands, g, set(), set(), ContextParams())
    assert [p.to_key for p in out] == ["A-4", "A-9", "A-8"]
    assert all(p.ranked_score == p.base_score for p in out)


def test_sorted_descending_with_key_tiebreak():
    g = ctx_graph()
    cands = [cand("A-1", "A-9", 0.5), cand("A-1", "A-4", 0.5)]
    out = contextualize("A-1", cands, g, set(), set(), ContextParams())
    assert [p.to_key for p in out] == ["A-4", "A-9"]


def test_unknown_center_raises():
    g = ctx_graph()
    with pytest.raises(UnknownIssueError):
        contextualize("Z-1", [], g, set(), set(), ContextParams())


def test_factors_must_be_positive():
    with pytest.raises(ValidationError):
        ContextParams(f_depth=0.0)
    with pytest.raises(ValidationError):
        ContextParams(properties=[PropertyRule("project", "X", -1.0)])


def test_scaling_preserves_order_for_equal_factor_sets():
    # candidates hit the same factor rules, so scaling every factor
    # rescales all their scores identically and cannot reorder them
    issues = [issue("A-1")] + [issue(f"B-{i}") for i in range(1, 5)]
    g = build_graph(issues, [])  # every B target is an orphan, infinitely far
    cands = [cand("A-1", f"B-{i}", 0.2 * i) for i in range(1, 5)]
    orders = []
    for scale in (1.0, 2.0, 5.0):
        params = ContextParams(
            min_depth=3, f_depth=2.0 * scale, f_orphan=1.5 * scale
        )
        ranked = contextualize("A-1", list(cands), g, set(), set(), params)
        orders.append([p.to_key for p in ranked])
    assert orders[0] == orders[1] == orders[2] == ["B-4", "B-3", "B-2", "B-1"]


# ---------------------------------------------------------------------------
# literal-interpreter equivalence on random instances
# ---------------------------------------------------------------------------


def run_interpreter_equivalence(seed: int) -> None:
    rng = random.Random(seed)
    issues, deps = build_random_graph(rng, max_nodes=40)
    g = build_graph(issues, deps)
    keys = sorted(g.issues)
    r0 = rng.choice(keys)
    targets = [k for k in keys if k != r0]
    rng.shuffle(targets)
    targets = targets[: rng.randint(0, min(12, len(targets)))]
    combined = [(t, round(rng.uniform(0.05, 2.0), 3)) for t in targets]
    existing = {
        norm_pair(r0, t) for t in targets if rng.random() < 0.2
    }
    rejected = {
        norm_pair(r0, t) for t in targets if rng.random() < 0.2
    }
    min_depth = rng.randint(0, 6)
    f_depth = rng.choice([0.5, 1.0, 2.0, 3.5])
    f_orphan = rng.choice([0.25, 1.0, 3.0])
    properties = []
    if rng.random() < 0.7:
        properties.append(("project", rng.choice(["RND", "OTHER"]), rng.choice([0.5, 1.5])))
    if rng.random() < 0.5:
        properties.append(("status", "Open", 2.0))
    if rng.random() < 0.3:
        properties.append(("priority", "2", 1.25))

    expected = rank_proposals_oracle(
        r0, combined, g, existing, rejected, min_depth, f_depth, f_orphan, properties
    )
    params = ContextParams(
        min_depth=min_depth,
        f_depth=f_depth,
        f_orphan=f_orphan,
        properties=[PropertyRule(*p) for p in properties],
    )
    cands = [cand(r0, t, base) for t, base in combined]
    got = contextualize(r0, cands, g, existing, rejected, params)
    assert [(p.to_key, round(p.ranked_score, 9)) for p in got] == [
        (t, round(s, 9)) for t, s in expected
    ], f"seed {seed}"


@pytest.mark.parametrize("seed", range(40))
def test_interpreter_equivalence_random(seed):
    run_interpreter_equivalence(seed)
