"""Issue graph: bidirected typed adjacency over issues.

Each logical dependency is stored once per endpoint with a direction flag
(outgoing=True on the `from` side) instead of materializing inverse labels.
Graphs are immutable after build; updates rebuild and swap.

Traversal (components, p-depth subgraphs, distances) follows accepted edges;
proposed edges are traversable only when `include_proposed` is set, and
rejected edges are never traversable.
"""
from __future__ import annotations

import statistics
from collections import deque
from dataclasses import dataclass, field

from .model import (
    Dependency,
    DependencyStatus,
    DependencyType,
    Issue,
    UnknownIssueError,
    ValidationError,
)

INFINITY = float("inf")


@dataclass(frozen=True)
class AdjEntry:
    """One side of a stored dependency."""

    neighbor: str
    dep_type: DependencyType
    outgoing: bool
    status: DependencyStatus
    score: float


@dataclass
class IssueGraph:
    issues: dict[str, Issue]
    adjacency: dict[str, list[AdjEntry]]
    dropped_dependencies: int = 0
    coalesced_dependencies: int = 0

    def __contains__(self, key: str) -> bool:
        return key in self.issues

    def __len__(self) -> int:
        return len(self.issues)

    def neighbors(self, key: str, include_proposed: bool = False) -> list[str]:
        """Traversable neighbor keys of `key`."""
        out = []
        for entry in self.adjacency.get(key, ()):
            if _traversable(entry.status, include_proposed):
                out.append(entry.neighbor)
        return out

    def edges(self) -> list[tuple[str, AdjEntry]]:
        """Every stored edge once, from its `from` side."""
        result = []
        for key, entries in self.adjacency.items():
            for entry in entries:
                if entry.outgoing:
                    result.append((key, entry))
        return result

    def dependencies(self) -> list[Dependency]:
        """Stored edges materialized back into Dependency records."""
        return [
            Dependency(
                from_key=key,
                to_key=entry.neighbor,
                dep_type=entry.dep_type,
                status=entry.status,
                score=entry.score,
            )
            for key, entry in self.edges()
        ]

    def is_orphan(self, key: str, include_proposed: bool = False) -> bool:
        """True when the issue has no traversable dependencies."""
        if key not in self.issues:
            raise UnknownIssueError(key)
        return not self.neighbors(key, include_proposed)


def _traversable(status: DependencyStatus, include_proposed: bool) -> bool:
    if status == DependencyStatus.REJECTED:
        return False
    if status == DependencyStatus.PROPOSED:
        return include_proposed
    return True


def build_graph(issues: list[Issue], deps: list[Dependency]) -> IssueGraph:
    """Assemble the symmetric adjacency structure.

    Lenient by design: dependencies with a missing endpoint are dropped and
    counted; duplicate edges on the same (unordered pair, type) coalesce,
    keeping the max score and the latest status/direction.
    """
    issue_map = {i.key: i for i in issues}
    chosen: dict[tuple[str, str, DependencyType], Dependency] = {}
    dropped = 0
    coalesced = 0
    for dep in deps:
        if dep.from_key not in issue_map or dep.to_key not in issue_map:
            dropped += 1
            continue
        slot = (*dep.pair, dep.dep_type)
        prev = chosen.get(slot)
        if prev is None:
            chosen[slot] = dep
        else:
            coalesced += 1
            chosen[slot] = Dependency(
                from_key=dep.from_key,
                to_key=dep.to_key,
                dep_type=dep.dep_type,
                status=dep.status,
                score=max(prev.score, dep.score),
                created=dep.created or prev.created,
            )
    adjacency: dict[str, list[AdjEntry]] = {key: [] for key in issue_map}
    for dep in chosen.values():
        adjacency[dep.from_key].append(
            AdjEntry(dep.to_key, dep.dep_type, True, dep.status, dep.score)
        )
        adjacency[dep.to_key].append(
            AdjEntry(dep.from_key, dep.dep_type, False, dep.status, dep.score)
        )
    return IssueGraph(
        issues=issue_map,
        adjacency=adjacency,
        dropped_dependencies=dropped,
        coalesced_dependencies=coalesced,
    )


def _bfs_levels(
    g: IssueGraph,
    r0: str,
    max_depth: float,
    include_proposed: bool = False,
) -> dict[str, int]:
    """Hop distance from r0 for every node within max_depth."""
    if r0 not in g.issues:
        raise UnknownIssueError(r0)
    levels = {r0: 0}
    queue = deque([r0])
    while queue:
        node = queue.popleft()
        depth = levels[node]
        if depth >= max_depth:
            continue
        for nb in g.neighbors(node, include_proposed):
            if nb not in levels:
                levels[nb] = depth + 1
                queue.append(nb)
    return levels


def hop_distances(
    g: IssueGraph,
    r0: str,
    max_depth: float = INFINITY,
    include_proposed: bool = False,
) -> dict[str, int]:
    """Public BFS-level map: node -> hop distance from r0, within max_depth."""
    return _bfs_levels(g, r0, max_depth, include_proposed)


def _induced(g: IssueGraph, keep: set[str]) -> IssueGraph:
    """Subgraph over `keep` with ALL stored dependencies between members."""
    issues = {k: g.issues[k] for k in keep}
    adjacency: dict[str, list[AdjEntry]] = {k: [] for k in keep}
    for key in keep:
        for entry in g.adjacency.get(key, ()):
            if entry.neighbor in keep:
                adjacency[key].append(entry)
    return IssueGraph(issues=issues, adjacency=adjacency)


def component_of(g: IssueGraph, r0: str, include_proposed: bool = False) -> IssueGraph:
    """Maximal connected subgraph containing r0 (the issue graph G of r0)."""
    levels = _bfs_levels(g, r0, INFINITY, include_proposed)
    return _induced(g, set(levels))


def p_depth_subgraph(
    g: IssueGraph, r0: str, p: int, include_proposed: bool = False
) -> IssueGraph:
    """Induced subgraph over all issues at hop distance <= p from r0.

    Edge set is induced (every dependency between included issues), not the
    BFS tree.
    """
    if p < 0:
        raise ValidationError(f"depth must be >= 0, got {p}")
    levels = _bfs_levels(g, r0, p, include_proposed)
    return _induced(g, set(levels))


def distance(
    g: IssueGraph, a: str, b: str, include_proposed: bool = False
) -> float:
    """Shortest hop count between a and b; inf when unreachable or absent."""
    if a not in g.issues:
        raise UnknownIssueError(a)
    if b not in g.issues:
        return INFINITY
    if a == b:
        return 0
    levels = {a: 0}
    queue = deque([a])
    while queue:
        node = queue.popleft()
        for nb in g.neighbors(node, include_proposed):
            if nb not in levels:
                levels[nb] = levels[node] + 1
                if nb == b:
                    return levels[nb]
                queue.append(nb)
    return INFINITY


def components(g: IssueGraph, include_proposed: bool = False) -> list[set[str]]:
    """Partition of the issue set into connected components."""
    seen: set[str] = set()
    parts: list[set[str]] = []
    for key in g.issues:
        if key in seen:
            continue
        levels = _bfs_levels(g, key, INFINITY, include_proposed)
        members = set(levels)
        seen |= members
        parts.append(members)
    return parts


@dataclass
class TopologyReport:
    """Table-style topology metrics over a built graph."""

    issue_count: int
    dependency_count: int
    dependencies_min: int
    dependencies_avg: float
    dependencies_median: float
    dependencies_max: int
    orphan_count: int
    orphan_fraction: float
    component_count: int
    component_sizes: list[int]
    degree_histogram: dict[int, int]
    # #p-depth-graphs: sum over issues of the smallest n with G^n = G,
    # at least 1 per issue (the fixpoint depth).
    p_depth_graph_count: int | None = None
    # #issues-in-p-graphs: p -> (min, avg, max) subgraph size.
    issues_in_p_graphs: dict[int, tuple[int, float, int]] = field(
        default_factory=dict
    )


def graph_stats(
    g: IssueGraph,
    p_range: range | None = None,
    sample: list[str] | None = None,
) -> TopologyReport:
    """Topology metrics; p-depth subgraph sizes only when p_range is given.

    The p-sweep is quadratic-ish, so callers may pass `sample` to restrict
    it (and the fixpoint count) to selected issues.
    """
    degrees = {
        key: len(g.neighbors(key)) for key in g.issues
    }
    values = sorted(degrees.values())
    parts = components(g)
    orphans = sum(1 for v in values if v == 0)
    n = len(g.issues)
    histogram: dict[int, int] = {}
    for v in values:
        histogram[v] = histogram.get(v, 0) + 1
    report = TopologyReport(
        issue_count=n,
        dependency_count=sum(values) // 2,
        dependencies_min=values[0] if values else 0,
        dependencies_avg=(sum(values) / n) if n else 0.0,
        dependencies_median=statistics.median(values) if values else 0.0,
        dependencies_max=values[-1] if values else 0,
        orphan_count=orphans,
        orphan_fraction=(orphans / n) if n else 0.0,
        component_count=len(parts),
        component_sizes=sorted((len(p) for p in parts), reverse=True),
        degree_histogram=histogram,
    )
    if p_range is not None:
        centers = sample if sample is not None else list(g.issues)
        sizes: dict[int, list[int]] = {p: [] for p in p_range}
        fixpoint_total = 0
        for key in centers:
            levels = _bfs_levels(g, key, INFINITY)
            eccentricity = max(levels.values()) if levels else 0
            fixpoint_total += max(1, eccentricity)
            by_depth = sorted(levels.values())
            for p in p_range:
                # nodes within distance p, via the sorted level list
                count = _count_leq(by_depth, p)
                sizes[p].append(count)
        report.p_depth_graph_count = fixpoint_total
        report.issues_in_p_graphs = {
            p: (min(v), sum(v) / len(v), max(v)) if v else (0, 0.0, 0)
            for p, v in sizes.items()
        }
    return report


def _count_leq(sorted_values: list[int], bound: int) -> int:
    import bisect

    return bisect.bisect_right(sorted_values, bound)
