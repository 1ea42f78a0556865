"""Seeded synthetic repository generation.

The real tracker corpus is not distributable, so evaluation runs on
generated repositories with planted ground truth: components of known
sizes, boundary-clean issue-key references plus decoys, near-copy duplicate
groups, and rule-violating dependency pairs. Every builder takes an explicit
random.Random so runs are reproducible from a seed.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .evaluate import LabeledPair
from .model import (
    Dependency,
    DependencyStatus,
    DependencyType,
    Issue,
    IssueType,
    Version,
)
from .store import DEPENDENCIES_FILE, ISSUES_FILE, dependency_to_json, issue_to_json

_WORDS = [
    "crash", "startup", "widget", "render", "layout", "focus", "scroll",
    "menu", "dialog", "button", "paint", "font", "style", "theme", "cursor",
    "window", "resize", "screen", "display", "driver", "network", "socket",
    "timeout", "request", "response", "parser", "syntax", "compile", "link",
    "plugin", "module", "import", "export", "cache", "memory", "leak",
    "thread", "race", "deadlock", "signal", "slot", "event", "loop",
    "animation", "frame", "image", "icon", "file", "path", "dialogue",
    "keyboard", "shortcut", "mouse", "click", "drag", "drop", "select",
    "text", "editor", "highlight", "search", "replace", "index", "build",
    "debug", "release", "install", "update", "version", "regression",
]

_STRUCTURAL_TYPES = [
    DependencyType.REQUIRES,
    DependencyType.RELATES,
    DependencyType.PARENT_CHILD,
    DependencyType.RESULTS,
    DependencyType.TESTS,
]

_TS = "2024-01-01T00:00:00Z"


def _words(rng: random.Random, count: int, pool: list[str] | None = None) -> str:
    pool = pool or _WORDS
    return " ".join(rng.choice(pool) for _ in range(count))


def make_issue(
    key: str,
    rng: random.Random,
    pool: list[str] | None = None,
    **overrides,
) -> Issue:
    fields = dict(
        key=key,
        title=_words(rng, rng.randint(3, 6), pool),
        description=_words(rng, rng.randint(6, 14), pool),
        comments=[],
        issue_type=rng.choice(list(IssueType)),
        status=rng.choice(["Open", "In Progress", "Closed"]),
        priority=rng.choice([None, 0, 1, 2, 3, 4, 5]),
        release=rng.choice(
            [None, Version.parse(f"{rng.randint(1, 6)}.{rng.randint(0, 9)}")]
        ),
        created=_TS,
        modified=_TS,
    )
    fields.update(overrides)
    return Issue(**fields)


def _edge(
    a: str,
    b: str,
    rng: random.Random,
    dep_type: DependencyType | None = None,
    status: DependencyStatus = DependencyStatus.ACCEPTED,
) -> Dependency:
    return Dependency(
        from_key=a,
        to_key=b,
        dep_type=dep_type or rng.choice(_STRUCTURAL_TYPES),
        status=status,
        score=1.0 if status == DependencyStatus.ACCEPTED else round(rng.uniform(0.3, 0.95), 3),
        created=_TS,
    )


@dataclass
class SyntheticRepo:
    issues: list[Issue] = field(default_factory=list)
    deps: list[Dependency] = field(default_factory=list)
    component_members: list[list[str]] = field(default_factory=list)
    planted_references: list[tuple[str, str]] = field(default_factory=list)
    planted_duplicate_groups: list[list[str]] = field(default_factory=list)
    planted_violations: list[tuple[str, str]] = field(default_factory=list)

    def issue_map(self) -> dict[str, Issue]:
        return {i.key: i for i in self.issues}


def build_components(
    rng: random.Random,
    sizes: list[int],
    project: str = "SYN",
    start: int = 1,
    extra_edge_ratio: float = 0.2,
    pool: list[str] | None = None,
) -> SyntheticRepo:
    """Connected components of exactly the requested sizes.

    Each component is a random tree (guaranteeing connectivity and size)
    plus a few extra in-component edges; components never share edges, so
    the size list is the ground truth for component queries.
    """
    repo = SyntheticRepo()
    number = start
    for size in sizes:
        members = []
        for _ in range(size):
            key = f"{project}-{number}"
            number += 1
            members.append(key)
            repo.issues.append(make_issue(key, rng, pool))
        for idx in range(1, size):
            anchor = members[rng.randrange(idx)]
            repo.deps.append(_edge(anchor, members[idx], rng))
        extras = int((size - 1) * extra_edge_ratio)
        for _ in range(extras):
            a, b = rng.sample(members, 2)
            repo.deps.append(_edge(a, b, rng))
        repo.component_members.append(members)
    return repo


def build_random_graph(
    rng: random.Random, max_nodes: int = 300, project: str = "RND"
) -> tuple[list[Issue], list[Dependency]]:
    """Arbitrary random graph (mixed statuses) for graph-law property tests.

    Text fields stay constant; only the structure and the scheduling
    properties are randomized.
    """
    n = rng.randint(1, max_nodes)
    issues = [
        Issue(
            key=f"{project}-{i + 1}",
            title=f"node {i + 1}",
            issue_type=rng.choice(list(IssueType)),
            status=rng.choice(["Open", "In Progress", "Closed"]),
            priority=rng.choice([None, 0, 1, 2, 3, 4, 5]),
            release=rng.choice(
                [None, Version.parse(f"{rng.randint(1, 6)}.{rng.randint(0, 9)}")]
            ),
            created=_TS,
            modified=_TS,
        )
        for i in range(n)
    ]
    keys = [i.key for i in issues]
    deps = []
    for _ in range(rng.randint(0, max(1, n))):
        if n < 2:
            break
        a, b = rng.sample(keys, 2)
        status = rng.choices(
            [
                DependencyStatus.ACCEPTED,
                DependencyStatus.PROPOSED,
                DependencyStatus.REJECTED,
            ],
            weights=[8, 1, 1],
        )[0]
        deps.append(_edge(a, b, rng, status=status))
    return issues, deps


def build_reference_corpus(
    rng: random.Random,
    planted: int = 500,
    decoys: int = 500,
    project: str = "QBS",
) -> SyntheticRepo:
    """Issues whose text mentions other issues with clean boundaries, plus
    decoy tokens that must never match (bad boundaries, six-digit numbers,
    self references)."""
    total = max(planted, decoys) + 50
    repo = SyntheticRepo()
    for i in range(total):
        repo.issues.append(make_issue(f"{project}-{i + 1}", rng))
    keys = [i.key for i in repo.issues]
    planted_pairs = set()
    while len(planted_pairs) < planted:
        src, dst = rng.sample(keys, 2)
        if (src, dst) in planted_pairs:
            continue
        planted_pairs.add((src, dst))
        issue = repo.issue_map()[src]
        spot = rng.randrange(3)
        mention = rng.choice(
            [
                f"possibly redundant with {dst} - close?",
                f"see {dst} for details",
                f"blocked by {dst}.",
                f"({dst}) looks related",
            ]
        )
        if spot == 0:
            issue.title = f"{issue.title} {mention}"
        elif spot == 1:
            issue.description = f"{issue.description}\n{mention}"
        else:
            issue.comments.append(mention)
    repo.planted_references = sorted(planted_pairs)
    issue_list = repo.issues
    for _ in range(decoys):
        issue = rng.choice(issue_list)
        target = rng.choice(keys)
        pid, num = target.split("-")
        decoy = rng.choice(
            [
                f"X{pid}-{num} fails",  # leading boundary violated
                f"{pid}2-{num} fails",  # acronym extended
                f"{pid}-{num}{rng.randint(0, 9)}00 fails"[:40],  # 6+ digits
                f"see {issue.key} here",  # self reference
                f"{pid.lower()}-{num} lowercased",  # case mismatch
            ]
        )
        issue.comments.append(decoy)
    return repo


def near_copy(text: str, rng: random.Random) -> str:
    """Perturb a text slightly: drop or duplicate a couple of tokens."""
    tokens = text.split()
    out = []
    for token in tokens:
        roll = rng.random()
        if roll < 0.08:
            continue
        out.append(token)
        if roll > 0.95:
            out.append(token)
    return " ".join(out) if out else text


def build_duplicate_corpus(
    rng: random.Random,
    groups: list[int],
    background: int = 50,
    project: str = "DUP",
    link_existing: bool = False,
) -> SyntheticRepo:
    """Duplicate groups of the given sizes over unique per-group vocabulary,
    plus background issues over a shared pool."""
    repo = SyntheticRepo()
    number = 1
    for gi, size in enumerate(groups):
        pool = [f"topic{gi}w{j}" for j in range(12)]
        base_title = _words(rng, 4, pool)
        base_desc = _words(rng, 10, pool)
        members = []
        for _ in range(size):
            key = f"{project}-{number}"
            number += 1
            members.append(key)
            repo.issues.append(
                make_issue(
                    key,
                    rng,
                    title=near_copy(base_title, rng),
                    description=near_copy(base_desc, rng),
                )
            )
        if link_existing and len(members) >= 2:
            repo.deps.append(
                _edge(members[0], members[1], rng, DependencyType.DUPLICATES)
            )
        repo.planted_duplicate_groups.append(members)
    for _ in range(background):
        key = f"{project}-{number}"
        number += 1
        repo.issues.append(make_issue(key, rng))
    return repo


def build_violation_pairs(
    rng: random.Random,
    count: int,
    project: str = "VIO",
    start: int = 1,
) -> SyntheticRepo:
    """Disjoint issue pairs each carrying exactly one rule violation."""
    repo = SyntheticRepo()
    number = start
    for i in range(count):
        a_key = f"{project}-{number}"
        b_key = f"{project}-{number + 1}"
        number += 2
        if i % 2 == 0:
            # requires violation: required issue scheduled later
            a = make_issue(a_key, rng, release=Version.parse("1.0"), priority=1)
            b = make_issue(b_key, rng, release=Version.parse("2.0"), priority=1)
            dep = _edge(a_key, b_key, rng, DependencyType.REQUIRES)
        else:
            # parent-child violation: unscheduled child, equal priority
            a = make_issue(a_key, rng, release=Version.parse("5.13"), priority=2)
            b = make_issue(b_key, rng, release=None, priority=2)
            dep = _edge(a_key, b_key, rng, DependencyType.PARENT_CHILD)
        repo.issues.extend([a, b])
        repo.deps.append(dep)
        repo.planted_violations.append((a_key, b_key))
    return repo


def build_consistent_pairs(
    rng: random.Random, count: int, project: str = "OKC", start: int = 1
) -> SyntheticRepo:
    """Disjoint issue pairs whose dependencies all satisfy the rules."""
    repo = SyntheticRepo()
    number = start
    for i in range(count):
        a_key = f"{project}-{number}"
        b_key = f"{project}-{number + 1}"
        number += 2
        release = Version.parse("3.1")
        a = make_issue(a_key, rng, release=release, priority=1)
        b = make_issue(b_key, rng, release=release, priority=1)
        dep_type = (
            DependencyType.REQUIRES if i % 2 == 0 else DependencyType.PARENT_CHILD
        )
        repo.issues.extend([a, b])
        repo.deps.append(_edge(a_key, b_key, rng, dep_type))
    return repo


def build_cv_corpus(
    rng: random.Random,
    duplicates: int = 1400,
    negatives: int = 1500,
    project: str = "CV",
    mention_fraction: float = 0.5,
) -> tuple[SyntheticRepo, list[LabeledPair]]:
    """Separable labeled pairs: near-copy duplicates over per-pair private
    vocabulary, negatives over fully disjoint vocabulary."""
    repo = SyntheticRepo()
    pairs: list[LabeledPair] = []
    number = 1
    for i in range(duplicates):
        pool = [f"dup{i}w{j}" for j in range(10)]
        title = _words(rng, 4, pool)
        desc = _words(rng, 9, pool)
        a_key = f"{project}-{number}"
        b_key = f"{project}-{number + 1}"
        number += 2
        a = make_issue(a_key, rng, title=title, description=desc)
        b = make_issue(
            b_key, rng, title=near_copy(title, rng), description=near_copy(desc, rng)
        )
        if rng.random() < mention_fraction:
            a.comments.append(f"looks redundant with {b_key} - close?")
        repo.issues.extend([a, b])
        pairs.append(LabeledPair(a_key, b_key, "duplicate"))
    for i in range(negatives):
        pool_a = [f"negA{i}w{j}" for j in range(8)]
        pool_b = [f"negB{i}w{j}" for j in range(8)]
        a_key = f"{project}-{number}"
        b_key = f"{project}-{number + 1}"
        number += 2
        repo.issues.append(
            make_issue(a_key, rng, title=_words(rng, 4, pool_a), description=_words(rng, 8, pool_a))
        )
        repo.issues.append(
            make_issue(b_key, rng, title=_words(rng, 4, pool_b), description=_words(rng, 8, pool_b))
        )
        pairs.append(LabeledPair(a_key, b_key, "not_duplicate"))
    return repo, pairs


def build_perf_repo(
    seed: int = 7,
    total_issues: int = 120_000,
    large_component: int = 8_952,
    total_dependencies: int = 30_000,
    project: str = "PERF",
) -> SyntheticRepo:
    """Large repository shaped like the evaluation corpus: one big component,
    many pair components, the rest orphans."""
    rng = random.Random(seed)
    pool = [f"w{i}" for i in range(20_000)]
    repo = SyntheticRepo()
    number = 1

    def new_issue() -> str:
        nonlocal number
        key = f"{project}-{number}"
        number += 1
        repo.issues.append(
            Issue(
                key=key,
                title=_words(rng, 3, pool),
                description=_words(rng, 7, pool),
                issue_type=IssueType.BUG,
                status="Open",
                priority=rng.choice([None, 0, 1, 2, 3, 4, 5]),
                release=rng.choice(
                    [None, Version.parse(f"{rng.randint(1, 6)}.{rng.randint(0, 9)}")]
                ),
                created=_TS,
                modified=_TS,
            )
        )
        return key

    members = [new_issue() for _ in range(large_component)]
    for idx in range(1, large_component):
        # mildly preferential anchors give bushy 5-depth neighborhoods
        anchor = members[rng.randrange(max(1, idx // 2))]
        repo.deps.append(_edge(anchor, members[idx], rng))
    repo.component_members.append(members)
    used_deps = large_component - 1
    while used_deps < total_dependencies and number <= total_issues - 2:
        a = new_issue()
        b = new_issue()
        repo.deps.append(_edge(a, b, rng))
        used_deps += 1
        repo.component_members.append([a, b])
    while number <= total_issues:
        new_issue()
    return repo


def write_jsonl(repo: SyntheticRepo, out_dir: str | Path) -> None:
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    with (base / ISSUES_FILE).open("w", encoding="utf-8") as fh:
        for issue in repo.issues:
            fh.write(json.dumps(issue_to_json(issue)) + "\n")
    with (base / DEPENDENCIES_FILE).open("w", encoding="utf-8") as fh:
        for dep in repo.deps:
            fh.write(json.dumps(dependency_to_json(dep)) + "\n")


def generate_repository(
    seed: int,
    component_sizes: list[int] | None = None,
    orphans: int = 20,
    duplicate_groups: list[int] | None = None,
    references: int = 10,
    violations: int = 5,
    project: str = "SYN",
) -> SyntheticRepo:
    """Demo-scale repository combining every planted feature."""
    rng = random.Random(seed)
    repo = build_components(rng, component_sizes or [12, 6, 3], project=project)
    number = max(int(i.key.split("-")[1]) for i in repo.issues) + 1
    for _ in range(orphans):
        repo.issues.append(make_issue(f"{project}-{number}", rng))
        number += 1
    dup = build_duplicate_corpus(
        rng, duplicate_groups or [3, 2], background=0, project=project + "D"
    )
    repo.issues.extend(dup.issues)
    repo.deps.extend(dup.deps)
    repo.planted_duplicate_groups = dup.planted_duplicate_groups
    vio = build_violation_pairs(rng, violations, project=project + "V")
    repo.issues.extend(vio.issues)
    repo.deps.extend(vio.deps)
    repo.planted_violations = vio.planted_violations
    keys = [i.key for i in repo.issues]
    for _ in range(references):
        src, dst = rng.sample(keys, 2)
        issue = repo.issue_map()[src]
        issue.comments.append(f"possibly related to {dst}")
        repo.planted_references.append((src, dst))
    return repo
