"""Shared builders and independent oracles for the test suite.

The oracles here deliberately avoid the production code paths they check:
the reference scanner walks characters instead of using a regex, the
contextualization interpreter follows the ranking pseudocode line by line,
and the diagnosis oracles enumerate subsets/assignments outright.
"""
from __future__ import annotations

import itertools

from issuedeps.graph import IssueGraph, build_graph, distance
from issuedeps.model import (
    Dependency,
    DependencyStatus,
    DependencyType,
    Issue,
    Version,
)


def issue(key: str, **kw) -> Issue:
    kw.setdefault("title", f"issue {key}")
    if "release" in kw and isinstance(kw["release"], str):
        kw["release"] = Version.parse(kw["release"])
    return Issue(key=key, **kw)


def dep(
    a: str,
    b: str,
    dep_type: DependencyType = DependencyType.RELATES,
    status: DependencyStatus = DependencyStatus.ACCEPTED,
    score: float = 1.0,
) -> Dependency:
    return Dependency(from_key=a, to_key=b, dep_type=dep_type, status=status, score=score)


def graph_of(issues: list[Issue], deps: list[Dependency]) -> IssueGraph:
    return build_graph(issues, deps)


def norm_pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


# ---------------------------------------------------------------------------
# Reference-detection oracle: character-by-character scanner
# ---------------------------------------------------------------------------


def scan_keys_oracle(text: str, project_ids: set[str]) -> list[str]:
    """All well-bounded `PID-digits` mentions, found without regex."""
    found = []
    for pid in sorted(project_ids):
        needle = pid + "-"
        i = 0
        while i <= len(text) - len(needle):
            if text[i : i + len(needle)] != needle:
                i += 1
                continue
            before_ok = i == 0 or not text[i - 1].isalnum()
            j = i + len(needle)
            k = j
            while k < len(text) and text[k].isdigit():
                k += 1
            digits = k - j
            if before_ok and 1 <= digits <= 5:
                found.append(text[i:k])
            i = max(k, i + 1)
    return found


# ---------------------------------------------------------------------------
# Contextualization oracle: literal line-by-line ranking interpreter
# ---------------------------------------------------------------------------


def rank_proposals_oracle(
    r0: str,
    combined: list[tuple[str, float]],  # (target, base score)
    g: IssueGraph,
    existing: set[tuple[str, str]],
    rejected: set[tuple[str, str]],
    min_depth: int,
    f_depth: float,
    f_orphan: float,
    properties: list[tuple[str, str, float]],
) -> list[tuple[str, float]]:
    """Follows the published contextualization steps one IF at a time."""
    surviving = []
    for target, base in combined:
        pair = norm_pair(r0, target)
        if pair in existing or pair in rejected:
            continue
        score = base
        if distance(g, r0, target) > min_depth:
            score = score * f_depth
        target_issue = g.issues.get(target)
        if target_issue is not None and not g.neighbors(target):
            score = score * f_orphan
        for name, value, factor in properties:
            if target_issue is not None and target_issue.property_value(name) == value:
                score = score * factor
        surviving.append((target, score))
    surviving.sort(key=lambda t: (-t[1], r0, t[0]))
    return surviving


# ---------------------------------------------------------------------------
# Diagnosis oracles
# ---------------------------------------------------------------------------


def preferred_minimal_diagnosis_oracle(candidates: list, oracle) -> set:
    """Exhaustive subset enumeration; preference keeps the earliest
    (most important) candidates."""
    diagnoses = []
    n = len(candidates)
    for r in range(n + 1):
        for combo in itertools.combinations(range(n), r):
            removed = set(combo)
            retained = [candidates[i] for i in range(n) if i not in removed]
            if oracle(retained):
                diagnoses.append(frozenset(removed))
    minimal = [d for d in diagnoses if not any(o < d for o in diagnoses)]
    preferred = max(
        minimal, key=lambda d: tuple(0 if i in d else 1 for i in range(n))
    )
    return {candidates[i] for i in preferred}


def spanning_trees(members: list[str], edges: list[tuple[str, str, float]]):
    """All spanning trees of the cluster, by brute-force subset enumeration."""
    m = len(members)
    for combo in itertools.combinations(edges, m - 1):
        parent = {v: v for v in members}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for a, b, _ in combo:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if ok:
            yield combo


def max_spanning_tree_weight(members: list[str], edges: list[tuple[str, str, float]]) -> float:
    best = None
    for tree in spanning_trees(members, edges):
        weight = sum(w for _, _, w in tree)
        if best is None or weight > best:
            best = weight
    assert best is not None, "cluster is not connected"
    return best


def is_spanning_tree(members: list[str], edges: list[tuple[str, str, float]]) -> bool:
    if len(edges) != len(members) - 1:
        return False
    parent = {v: v for v in members}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, _ in edges:
        if a not in parent or b not in parent:
            return False
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return len({find(v) for v in members}) == 1
