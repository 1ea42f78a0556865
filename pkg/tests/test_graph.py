import random

import pytest

from helpers import dep, graph_of, issue
from issuedeps.generate import build_components, build_random_graph
from issuedeps.graph import (
    INFINITY,
    build_graph,
    component_of,
    components,
    distance,
    graph_stats,
    p_depth_subgraph,
)
from issuedeps.model import DependencyStatus, DependencyType, UnknownIssueError


def chain(*keys):
    issues = [issue(k) for k in keys]
    deps = [dep(keys[i], keys[i + 1]) for i in range(len(keys) - 1)]
    return issues, deps


def test_build_single_orphan():
    g = build_graph([issue("A-1")], [])
    assert len(g) == 1
    assert g.adjacency["A-1"] == []
    assert g.is_orphan("A-1")


def test_build_symmetry_and_direction_flags():
    g = graph_of(
        [issue("A-1"), issue("A-2")],
        [dep("A-1", "A-2", DependencyType.REQUIRES)],
    )
    [fwd] = g.adjacency["A-1"]
    [rev] = g.adjacency["A-2"]
    assert fwd.neighbor == "A-2" and fwd.outgoing
    assert rev.neighbor == "A-1" and not rev.outgoing
    assert fwd.dep_type == rev.dep_type == DependencyType.REQUIRES


def test_build_drops_missing_endpoint():
    g = graph_of(
        [issue("A-1"), issue("A-2")],
        [dep("A-1", "A-3", DependencyType.RELATES)],
    )
    assert g.dropped_dependencies == 1
    assert g.adjacency["A-1"] == []


def test_build_coalesces_duplicate_edges_max_score():
    g = graph_of(
        [issue("A-1"), issue("A-2")],
        [
            dep("A-1", "A-2", DependencyType.RELATES, DependencyStatus.PROPOSED, 0.4),
            dep("A-2", "A-1", DependencyType.RELATES, DependencyStatus.PROPOSED, 0.9),
        ],
    )
    assert g.coalesced_dependencies == 1
    [entry] = g.adjacency["A-1"]
    assert entry.score == 0.9
    # same pair with a different type stays a distinct edge
    g2 = graph_of(
        [issue("A-1"), issue("A-2")],
        [
            dep("A-1", "A-2", DependencyType.RELATES),
            dep("A-1", "A-2", DependencyType.REQUIRES),
        ],
    )
    assert len(g2.adjacency["A-1"]) == 2


def test_component_of_chain_and_orphan():
    issues, deps = chain("A-1", "A-2", "A-3")
    issues.append(issue("A-4"))
    g = graph_of(issues, deps)
    comp = component_of(g, "A-1")
    assert set(comp.issues) == {"A-1", "A-2", "A-3"}
    assert len(comp.edges()) == 2
    orphan_comp = component_of(g, "A-4")
    assert set(orphan_comp.issues) == {"A-4"}
    assert orphan_comp.edges() == []


def test_component_of_unknown_key():
    g = graph_of([issue("A-1")], [])
    with pytest.raises(UnknownIssueError):
        component_of(g, "A-9")


def test_component_of_planted_size():
    # the generator knows the ground truth component sizes
    rng = random.Random(42)
    repo = build_components(rng, sizes=[137, 55, 9])
    g = graph_of(repo.issues, repo.deps)
    for members in repo.component_members:
        comp = component_of(g, members[0])
        assert set(comp.issues) == set(members)


def test_p_depth_zero_is_center_only():
    issues, deps = chain("A-1", "A-2")
    g = graph_of(issues, deps)
    sub = p_depth_subgraph(g, "A-1", 0)
    assert set(sub.issues) == {"A-1"}
    assert sub.edges() == []


def test_p_depth_induced_includes_cross_edges():
    # triangle: BFS tree from A would omit B-C, induction must include it
    issues = [issue(k) for k in ("A-1", "A-2", "A-3")]
    deps = [dep("A-1", "A-2"), dep("A-2", "A-3"), dep("A-1", "A-3")]
    g = graph_of(issues, deps)
    sub = p_depth_subgraph(g, "A-1", 1)
    assert set(sub.issues) == {"A-1", "A-2", "A-3"}
    assert len(sub.edges()) == 3


def test_p_depth_star():
    center = issue("A-1")
    leaves = [issue(f"A-{i}") for i in range(2, 8)]
    deps = [dep("A-1", leaf.key) for leaf in leaves]
    g = graph_of([center] + leaves, deps)
    assert len(p_depth_subgraph(g, "A-1", 5).issues) == 7


def test_distance_basics():
    issues, deps = chain("A-1", "A-2", "A-3")
    issues.append(issue("A-4"))
    g = graph_of(issues, deps)
    assert distance(g, "A-1", "A-1") == 0
    assert distance(g, "A-1", "A-3") == 2
    assert distance(g, "A-1", "A-4") == INFINITY
    assert distance(g, "A-1", "A-99") == INFINITY
    with pytest.raises(UnknownIssueError):
        distance(g, "A-99", "A-1")


def test_traversal_statuses():
    issues = [issue(k) for k in ("A-1", "A-2", "A-3")]
    deps = [
        dep("A-1", "A-2", DependencyType.RELATES, DependencyStatus.PROPOSED, 0.5),
        dep("A-2", "A-3", DependencyType.RELATES, DependencyStatus.REJECTED, 0.5),
    ]
    g = graph_of(issues, deps)
    # default view: proposed and rejected edges are not structure
    assert distance(g, "A-1", "A-2") == INFINITY
    assert g.is_orphan("A-1")
    # include_proposed makes proposed (but never rejected) edges traversable
    assert distance(g, "A-1", "A-2", include_proposed=True) == 1
    assert distance(g, "A-2", "A-3", include_proposed=True) == INFINITY


def test_graph_stats_trivial():
    g = build_graph([issue("A-1")], [])
    report = graph_stats(g)
    assert report.orphan_fraction == 1.0
    assert report.dependencies_avg == 0.0
    g2 = graph_of([issue("A-1"), issue("A-2")], [dep("A-1", "A-2")])
    report2 = graph_stats(g2)
    assert report2.dependencies_avg == 1.0
    assert report2.dependencies_median == 1
    assert report2.orphan_count == 0
    assert report2.component_count == 1


def test_graph_stats_matches_planted_histogram():
    rng = random.Random(7)
    repo = build_components(rng, sizes=[30, 12], extra_edge_ratio=0.0)
    g = graph_of(repo.issues, repo.deps)
    # trees: sum of degrees = 2 * (n - 1) per component
    report = graph_stats(g)
    expected_edges = (30 - 1) + (12 - 1)
    assert report.dependency_count == expected_edges
    assert sum(d * c for d, c in report.degree_histogram.items()) == 2 * expected_edges
    assert report.component_sizes == [30, 12]


def test_graph_stats_p_range():
    issues, deps = chain("A-1", "A-2", "A-3")
    g = graph_of(issues, deps)
    report = graph_stats(g, p_range=range(1, 3))
    # chain of 3: depth-1 sizes are 2,3,2; depth-2 sizes all 3
    assert report.issues_in_p_graphs[1] == (2, 7 / 3, 3)
    assert report.issues_in_p_graphs[2] == (3, 3.0, 3)
    # fixpoint depths (eccentricities): 2, 1, 2
    assert report.p_depth_graph_count == 5


# ---------------------------------------------------------------------------
# graph laws on random instances
# ---------------------------------------------------------------------------


def check_graph_laws(seed: int, max_nodes: int = 60) -> None:
    rng = random.Random(seed)
    issues, deps = build_random_graph(rng, max_nodes)
    g = build_graph(issues, deps)
    # symmetry: every stored edge is present from both endpoints
    for key, entries in g.adjacency.items():
        for entry in entries:
            assert key != entry.neighbor, "self-loop"
            back = [
                e
                for e in g.adjacency[entry.neighbor]
                if e.neighbor == key
                and e.dep_type == entry.dep_type
                and e.outgoing != entry.outgoing
            ]
            assert back, f"missing inverse entry for {key}->{entry.neighbor}"
            assert entry.neighbor in g.issues
    # components partition the issue set
    parts = components(g)
    seen = set()
    for part in parts:
        assert not (part & seen)
        seen |= part
    assert seen == set(g.issues)
    # nesting, fixpoint, and distance-ball equality from a few centers
    centers = rng.sample(sorted(g.issues), min(3, len(g.issues)))
    for r0 in centers:
        comp = set(component_of(g, r0).issues)
        previous: set[str] = set()
        prev_edges = -1
        for p in range(0, len(g.issues) + 1):
            sub = p_depth_subgraph(g, r0, p)
            nodes = set(sub.issues)
            assert previous <= nodes <= comp
            ball = {k for k in g.issues if distance(g, r0, k) <= p}
            assert nodes == ball
            n_edges = len(sub.edges())
            assert n_edges >= prev_edges
            if nodes == previous:
                break
            previous, prev_edges = nodes, n_edges
        assert previous == comp, "p-depth subgraphs must reach the component"


@pytest.mark.parametrize("seed", range(25))
def test_graph_laws_random(seed):
    check_graph_laws(seed)
