"""Release/priority consistency checking and preferred diagnosis.

The pipeline mirrors the review workflow: collapse accepted duplicates,
check every intra-project `requires` / `parent_child` dependency against the
two dependency rules, and, when violations exist, compute two alternative
repair sets with FastDiag — one over dependencies, one over issue property
assignments — each under its own time budget.

Release numbers are encoded as integers (x*10^6 + y*10^3 + z) so ordering
constraints reduce to integer comparisons; a missing release reads as "later
than everything" (unscheduled).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .graph import IssueGraph, build_graph, p_depth_subgraph
from .model import (
    Dependency,
    DependencyStatus,
    DependencyType,
    Issue,
    IssueDepsError,
    UnknownIssueError,
    ValidationError,
    project_of,
)

TOP = math.inf  # missing release: sorts after every encoded version

DEFAULT_TIME_LIMIT = 5.0

REQUIRES_RULE = "requires_rule"
PARENT_CHILD_RULE = "parent_child_rule"


class DiagnosisTimeout(IssueDepsError):
    """Raised internally when a diagnosis exceeds its time budget."""


@dataclass(frozen=True)
class EncodedIssue:
    key: str
    prio: int | None  # None = missing; clauses involving it are skipped
    rel: float  # encoded release or TOP


def encode_issue(issue: Issue) -> EncodedIssue:
    rel = TOP if issue.release is None else float(issue.release.encode())
    return EncodedIssue(key=issue.key, prio=issue.priority, rel=rel)


@dataclass
class RuleViolation:
    dependency: Dependency
    rule: str
    detail: str


@dataclass
class CheckResult:
    violations: list[RuleViolation]
    cross_project_skipped: int


@dataclass
class DiagnosisResult:
    consistent: bool
    violations: list[RuleViolation] = field(default_factory=list)
    diag_dependencies: list[Dependency] = field(default_factory=list)
    diag_issues: list[str] = field(default_factory=list)
    dep_diag_timed_out: bool = False
    issue_diag_timed_out: bool = False
    elapsed: float = 0.0
    cross_project_skipped: int = 0


# ---------------------------------------------------------------------------
# Duplicate merging
# ---------------------------------------------------------------------------


def merge_map(g: IssueGraph) -> dict[str, str]:
    """Representative key for every issue under accepted-duplicate merging.

    The representative is the unique member not resolved as "Duplicate" when
    there is exactly one such member, otherwise the lexicographically
    smallest key.
    """
    parent: dict[str, str] = {key: key for key in g.issues}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for key, entry in g.edges():
        if (
            entry.dep_type == DependencyType.DUPLICATES
            and entry.status == DependencyStatus.ACCEPTED
        ):
            ra, rb = find(key), find(entry.neighbor)
            if ra != rb:
                parent[ra] = rb
    groups: dict[str, list[str]] = {}
    for key in g.issues:
        groups.setdefault(find(key), []).append(key)
    mapping: dict[str, str] = {}
    for members in groups.values():
        if len(members) == 1:
            mapping[members[0]] = members[0]
            continue
        keepers = [
            m for m in members if g.issues[m].resolution != "Duplicate"
        ]
        rep = keepers[0] if len(keepers) == 1 else min(members)
        for m in members:
            mapping[m] = rep
    return mapping


def merge_duplicates(g: IssueGraph) -> IssueGraph:
    """Collapse accepted-duplicate groups into their representative node.

    The merged node keeps the representative's properties and inherits the
    union of the group's non-duplicate dependencies; self-loops vanish and
    parallel edges coalesce on (pair, type).
    """
    mapping = merge_map(g)
    issues = [g.issues[rep] for rep in sorted(set(mapping.values()))]
    deps = []
    for key, entry in g.edges():
        if entry.dep_type == DependencyType.DUPLICATES:
            continue
        a, b = mapping[key], mapping[entry.neighbor]
        if a == b:
            continue
        deps.append(
            Dependency(
                from_key=a,
                to_key=b,
                dep_type=entry.dep_type,
                status=entry.status,
                score=entry.score,
            )
        )
    return build_graph(issues, deps)


# ---------------------------------------------------------------------------
# Dependency rules
# ---------------------------------------------------------------------------


def check_dependency(d: Dependency, issues: dict[str, Issue]) -> RuleViolation | None:
    """Evaluate one requires / parent_child dependency.

    requires (from requires to): the required issue must not have a later
    release or a lower priority (larger number) than the requiring issue.

    parent_child (from is parent of to): consistent when the child is
    scheduled no later than the parent OR has lower priority than it.

    A missing release reads as TOP (later than everything); when either
    priority is missing the priority clause is skipped.
    """
    if d.dep_type not in (DependencyType.REQUIRES, DependencyType.PARENT_CHILD):
        raise ValidationError(f"rule check does not apply to {d.dep_type.value}")
    a = encode_issue(issues[d.from_key])
    b = encode_issue(issues[d.to_key])
    if d.dep_type == DependencyType.REQUIRES:
        if b.rel > a.rel:
            return RuleViolation(
                d,
                REQUIRES_RULE,
                f"required {b.key} scheduled later ({_rel(b)}) than {a.key} ({_rel(a)})",
            )
        if a.prio is not None and b.prio is not None and b.prio > a.prio:
            return RuleViolation(
                d,
                REQUIRES_RULE,
                f"required {b.key} has lower priority (P{b.prio}) than {a.key} (P{a.prio})",
            )
        return None
    parent, child = a, b
    release_ok = child.rel <= parent.rel
    priority_ok = (
        child.prio is not None
        and parent.prio is not None
        and child.prio > parent.prio
    )
    if release_ok or priority_ok:
        return None
    return RuleViolation(
        d,
        PARENT_CHILD_RULE,
        f"child {child.key} ({_rel(child)}) scheduled after parent {parent.key}"
        f" ({_rel(parent)}) without lower priority",
    )


def _rel(e: EncodedIssue) -> str:
    return "unscheduled" if e.rel == TOP else str(int(e.rel))


def checkable_dependencies(sub: IssueGraph) -> tuple[list[Dependency], int]:
    """Accepted intra-project requires/parent_child edges, plus the count of
    cross-project ones that were skipped."""
    deps = []
    skipped = 0
    for key, entry in sub.edges():
        if entry.dep_type not in (
            DependencyType.REQUIRES,
            DependencyType.PARENT_CHILD,
        ):
            continue
        if entry.status != DependencyStatus.ACCEPTED:
            continue
        if project_of(key) != project_of(entry.neighbor):
            skipped += 1
            continue
        deps.append(
            Dependency(
                from_key=key,
                to_key=entry.neighbor,
                dep_type=entry.dep_type,
                status=entry.status,
                score=entry.score,
            )
        )
    deps.sort(key=lambda d: (d.from_key, d.to_key, d.dep_type.value))
    return deps, skipped


def check_consistency(sub: IssueGraph) -> CheckResult:
    """Rule check over every checkable dependency of a merged subgraph."""
    deps, skipped = checkable_dependencies(sub)
    violations = []
    for dep in deps:
        violation = check_dependency(dep, sub.issues)
        if violation is not None:
            violations.append(violation)
    return CheckResult(violations=violations, cross_project_skipped=skipped)


# ---------------------------------------------------------------------------
# FastDiag
# ---------------------------------------------------------------------------


def _check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise DiagnosisTimeout()


def fastdiag(
    ordered_candidates: Sequence,
    background: Sequence,
    oracle: Callable[[list], bool],
    deadline: float | None = None,
) -> list:
    """Preferred minimal diagnosis via divide-and-conquer.

    `ordered_candidates` is most-important-first; the result removes the
    least important constraints compatible with minimality, preserving the
    longest possible important prefix. `oracle` receives background plus the
    retained candidates and reports consistency.
    """
    candidates = list(ordered_candidates)
    bg = list(background)

    def consistent(retained_idx) -> bool:
        _check_deadline(deadline)
        return oracle(bg + [candidates[i] for i in sorted(retained_idx)])

    if not consistent(()):
        raise ValidationError("background alone is inconsistent")
    all_idx = frozenset(range(len(candidates)))
    if not candidates or consistent(all_idx):
        return []
    # The recursion sacrifices earlier list elements first, so feed it the
    # reversed (least-important-first) order.
    work = list(range(len(candidates) - 1, -1, -1))
    diag = _fd(False, work, all_idx, consistent)
    return [candidates[i] for i in sorted(diag)]


def _fd(removed_any: bool, c: list[int], ac: frozenset[int], consistent) -> list[int]:
    if removed_any and consistent(ac):
        return []
    if len(c) == 1:
        return list(c)
    k = len(c) // 2
    c1, c2 = c[:k], c[k:]
    d1 = _fd(bool(c1), c2, ac - frozenset(c1), consistent)
    d2 = _fd(bool(d1), c1, ac - frozenset(d1), consistent)
    return d1 + d2


# ---------------------------------------------------------------------------
# Feasibility of property assignments (issue diagnosis oracle)
# ---------------------------------------------------------------------------

_PRIO_VALUES = frozenset(range(6))


@dataclass
class _Domain:
    rel_lo: float
    rel_hi: float
    prios: set[int]
    allow_missing: bool

    def copy(self) -> "_Domain":
        return _Domain(self.rel_lo, self.rel_hi, set(self.prios), self.allow_missing)

    def prio_empty(self) -> bool:
        return not self.prios and not self.allow_missing


def _fixed_domain(e: EncodedIssue) -> _Domain:
    if e.prio is None:
        return _Domain(e.rel, e.rel, set(), True)
    return _Domain(e.rel, e.rel, {e.prio}, False)


def _free_domain() -> _Domain:
    return _Domain(0.0, TOP, set(_PRIO_VALUES), True)


def assignments_feasible(
    issues: dict[str, Issue],
    fixed: set[str],
    deps: list[Dependency],
    deadline: float | None = None,
) -> bool:
    """Can the non-fixed issues be re-scheduled / re-prioritized so that all
    dependency rules hold?

    Solved by interval propagation over the release ordering and priority
    ordering constraints; the parent-child rule's disjunction is resolved by
    constructive pruning, with branching only on the (rare) cases where both
    disjuncts stay open after propagation.
    """
    domains: dict[str, _Domain] = {}
    for key, issue in issues.items():
        if key in fixed:
            domains[key] = _fixed_domain(encode_issue(issue))
        else:
            domains[key] = _free_domain()
    rel_le: list[tuple[str, str]] = []  # rel[x] <= rel[y]
    prio_le: list[tuple[str, str]] = []  # missing-skippable prio[x] <= prio[y]
    prio_gt: list[tuple[str, str]] = []  # enforced rescue prio[x] > prio[y]
    open_pc: list[tuple[str, str]] = []  # (parent, child), disjunct undecided
    for d in deps:
        if d.dep_type == DependencyType.REQUIRES:
            rel_le.append((d.to_key, d.from_key))
            prio_le.append((d.to_key, d.from_key))
        elif d.dep_type == DependencyType.PARENT_CHILD:
            open_pc.append((d.from_key, d.to_key))
    return _solve(domains, rel_le, prio_le, prio_gt, open_pc, deadline)


def _solve(domains, rel_le, prio_le, prio_gt, open_pc, deadline) -> bool:
    _check_deadline(deadline)
    if not _propagate(domains, rel_le, prio_le, prio_gt, open_pc, deadline):
        return False
    if not open_pc:
        return True
    parent_key, child_key = open_pc[0]
    rest = open_pc[1:]
    # branch 1: schedule the child no later than the parent
    state = {k: d.copy() for k, d in domains.items()}
    if _solve(
        state,
        rel_le + [(child_key, parent_key)],
        list(prio_le),
        list(prio_gt),
        list(rest),
        deadline,
    ):
        return True
    # branch 2: give the child strictly lower priority
    state = {k: d.copy() for k, d in domains.items()}
    state[child_key].allow_missing = False
    state[parent_key].allow_missing = False
    return _solve(
        state,
        list(rel_le),
        list(prio_le),
        prio_gt + [(child_key, parent_key)],
        list(rest),
        deadline,
    )


def _propagate(domains, rel_le, prio_le, prio_gt, open_pc, deadline) -> bool:
    changed = True
    while changed:
        _check_deadline(deadline)
        changed = False
        for x, y in rel_le:
            dx, dy = domains[x], domains[y]
            if dx.rel_hi > dy.rel_hi:
                dx.rel_hi = dy.rel_hi
                changed = True
            if dy.rel_lo < dx.rel_lo:
                dy.rel_lo = dx.rel_lo
                changed = True
            if dx.rel_lo > dx.rel_hi or dy.rel_lo > dy.rel_hi:
                return False
        for x, y in prio_le:
            dx, dy = domains[x], domains[y]
            if dx.allow_missing or dy.allow_missing:
                continue  # still satisfiable by leaving a priority unset
            if not dx.prios or not dy.prios:
                return False
            hi = max(dy.prios)
            lo = min(dx.prios)
            new_x = {v for v in dx.prios if v <= hi}
            new_y = {v for v in dy.prios if v >= lo}
            if new_x != dx.prios:
                dx.prios = new_x
                changed = True
            if new_y != dy.prios:
                dy.prios = new_y
                changed = True
            if not dx.prios or not dy.prios:
                return False
        for x, y in prio_gt:  # prio[x] > prio[y], both numeric
            dx, dy = domains[x], domains[y]
            if not dx.prios or not dy.prios:
                return False
            new_x = {v for v in dx.prios if v > min(dy.prios)}
            new_y = {v for v in dy.prios if v < max(dx.prios)}
            if new_x != dx.prios:
                dx.prios = new_x
                changed = True
            if new_y != dy.prios:
                dy.prios = new_y
                changed = True
            if not dx.prios or not dy.prios:
                return False
        remaining = []
        for parent_key, child_key in open_pc:
            dp, dc = domains[parent_key], domains[child_key]
            rel_possible = dc.rel_lo <= dp.rel_hi
            prio_possible = (
                bool(dc.prios)
                and bool(dp.prios)
                and max(dc.prios) > min(dp.prios)
            )
            if not rel_possible and not prio_possible:
                return False
            if not rel_possible:
                dc.allow_missing = False
                dp.allow_missing = False
                prio_gt.append((child_key, parent_key))
                changed = True
            elif not prio_possible:
                rel_le.append((child_key, parent_key))
                changed = True
            else:
                remaining.append((parent_key, child_key))
        open_pc[:] = remaining
    return True


# ---------------------------------------------------------------------------
# Diagnosis (Algorithm-4 style orchestration)
# ---------------------------------------------------------------------------


def _dep_importance(d: Dependency, issues: dict[str, Issue]) -> tuple:
    prios = [
        issues[k].priority
        for k in (d.from_key, d.to_key)
        if issues[k].priority is not None
    ]
    urgency = min(prios) if prios else 6  # unprioritized ranks least important
    return (urgency, d.from_key, d.to_key, d.dep_type.value)


def _issue_importance(key: str, issues: dict[str, Issue]) -> tuple:
    prio = issues[key].priority
    return (prio if prio is not None else 6, key)


def diagnose(
    r0: str,
    sub: IssueGraph,
    time_limit: float = DEFAULT_TIME_LIMIT,
) -> DiagnosisResult:
    """Check a duplicates-merged subgraph and compute both repair sets.

    Each diagnosis gets its own time budget; on expiry its timed-out flag is
    set and the list stays empty. r0 is protected and never diagnosed away.
    """
    if r0 not in sub.issues:
        raise UnknownIssueError(r0)
    start = time.monotonic()
    deps, skipped = checkable_dependencies(sub)
    issues = sub.issues
    violations = [
        v for v in (check_dependency(d, issues) for d in deps) if v is not None
    ]
    check = CheckResult(violations=violations, cross_project_skipped=skipped)
    if not check.violations:
        return DiagnosisResult(
            consistent=True,
            cross_project_skipped=check.cross_project_skipped,
            elapsed=time.monotonic() - start,
        )
    result = DiagnosisResult(
        consistent=False,
        violations=check.violations,
        cross_project_skipped=check.cross_project_skipped,
    )

    dep_candidates = sorted(deps, key=lambda d: _dep_importance(d, issues))
    dep_deadline = time.monotonic() + time_limit

    def dep_oracle(constraints: list) -> bool:
        return all(check_dependency(d, issues) is None for d in constraints)

    try:
        result.diag_dependencies = fastdiag(
            dep_candidates, [], dep_oracle, deadline=dep_deadline
        )
    except DiagnosisTimeout:
        result.dep_diag_timed_out = True
        result.diag_dependencies = []

    issue_candidates = sorted(
        (k for k in issues if k != r0),
        key=lambda k: _issue_importance(k, issues),
    )
    issue_deadline = time.monotonic() + time_limit

    def issue_oracle(constraints: list) -> bool:
        return assignments_feasible(
            issues, set(constraints), deps, deadline=issue_deadline
        )

    try:
        result.diag_issues = fastdiag(
            issue_candidates, [r0], issue_oracle, deadline=issue_deadline
        )
    except DiagnosisTimeout:
        result.issue_diag_timed_out = True
        result.diag_issues = []

    result.elapsed = time.monotonic() - start
    return result


def check_and_diagnose(
    g: IssueGraph,
    r0: str,
    depth: int,
    run_diagnosis: bool = False,
    time_limit: float = DEFAULT_TIME_LIMIT,
) -> DiagnosisResult:
    """Full pipeline: p-depth subgraph, duplicate merge, check, diagnose."""
    sub = p_depth_subgraph(g, r0, depth)
    mapping = merge_map(sub)
    merged = merge_duplicates(sub)
    rep = mapping[r0]
    if run_diagnosis:
        return diagnose(rep, merged, time_limit)
    start = time.monotonic()
    check = check_consistency(merged)
    return DiagnosisResult(
        consistent=not check.violations,
        violations=check.violations,
        cross_project_skipped=check.cross_project_skipped,
        elapsed=time.monotonic() - start,
    )
