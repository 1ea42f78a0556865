"""Repository persistence: JSONL snapshots, incremental updates, decisions.

The source of truth is three plain JSONL files (issues, dependencies, and an
append-only decision log). Imports build a fresh repository and swap it in
atomically; a malformed line is recorded and skipped, an I/O failure aborts
the import and keeps the previous state.
"""
from __future__ import annotations

import io
import json
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable

from .model import (
    DecisionRecord,
    DecisionVerdict,
    Dependency,
    DependencyStatus,
    DependencyType,
    Issue,
    IssueType,
    UnknownIssueError,
    ValidationError,
    Version,
    parse_issue_key,
)

ISSUES_FILE = "issues.jsonl"
DEPENDENCIES_FILE = "dependencies.jsonl"
DECISIONS_FILE = "decisions.jsonl"

_ISSUE_FIELDS = {
    "key",
    "project",
    "title",
    "description",
    "comments",
    "type",
    "status",
    "resolution",
    "priority",
    "release",
    "created",
    "modified",
}


@dataclass
class ParseIssue:
    line: int
    message: str


@dataclass
class ImportReport:
    issues: int = 0
    dependencies: int = 0
    dropped: int = 0
    errors: list[ParseIssue] = field(default_factory=list)


@dataclass
class UpdateReport:
    changed_issue_keys: list[str] = field(default_factory=list)
    changed_dependencies: list[tuple[str, str, str]] = field(default_factory=list)
    errors: list[ParseIssue] = field(default_factory=list)
    # Rejected pairs whose issues changed in this update; the rejection
    # stays sticky but reviewers may want to revisit it.
    revisit_rejected: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class Repository:
    issues: dict[str, Issue] = field(default_factory=dict)
    dependencies: list[Dependency] = field(default_factory=list)
    decisions: list[DecisionRecord] = field(default_factory=list)
    last_import: str = ""

    def project_ids(self) -> set[str]:
        """Project acronyms present in the repository."""
        return {issue.project for issue in self.issues.values()}

    def rejected_pairs(self) -> set[tuple[str, str]]:
        """Fold of the decision log: rejects not superseded by a later accept."""
        state: dict[tuple[str, str], DecisionVerdict] = {}
        for record in self.decisions:
            state[record.pair] = record.verdict
        return {
            pair
            for pair, verdict in state.items()
            if verdict == DecisionVerdict.REJECT
        }

    def dependency_pairs(self) -> set[tuple[str, str]]:
        return {dep.pair for dep in self.dependencies}

    def accepted_pairs(self) -> set[tuple[str, str]]:
        """Pairs with a real (accepted) dependency record."""
        return {
            dep.pair
            for dep in self.dependencies
            if dep.status == DependencyStatus.ACCEPTED
        }


def parse_issue_line(obj: dict) -> Issue:
    key = obj.get("key")
    if not isinstance(key, str):
        raise ValidationError("missing or non-string 'key'")
    project, _ = parse_issue_key(key)
    declared = obj.get("project")
    if declared is not None and declared != project:
        raise ValidationError(f"project {declared!r} does not match key {key!r}")
    raw_type = obj.get("type", "bug")
    try:
        issue_type = IssueType(raw_type)
    except ValueError:
        raise ValidationError(f"unknown issue type {raw_type!r}") from None
    priority = obj.get("priority")
    if priority is not None and not isinstance(priority, int):
        raise ValidationError(f"priority must be an integer, got {priority!r}")
    release = obj.get("release")
    comments = obj.get("comments", [])
    if not isinstance(comments, list) or not all(
        isinstance(c, str) for c in comments
    ):
        raise ValidationError("'comments' must be a list of strings")
    custom = {
        name: value
        for name, value in obj.items()
        if name not in _ISSUE_FIELDS and isinstance(value, str)
    }
    return Issue(
        key=key,
        title=obj.get("title", ""),
        description=obj.get("description", ""),
        comments=list(comments),
        issue_type=issue_type,
        status=obj.get("status", "Open"),
        resolution=obj.get("resolution"),
        priority=priority,
        release=Version.parse(release) if release else None,
        created=obj.get("created", ""),
        modified=obj.get("modified", ""),
        custom=custom,
    )


def parse_dependency_line(obj: dict) -> Dependency:
    from_key = obj.get("from")
    to_key = obj.get("to")
    if not isinstance(from_key, str) or not isinstance(to_key, str):
        raise ValidationError("dependency needs string 'from' and 'to'")
    try:
        dep_type = DependencyType(obj.get("dep_type", "untyped"))
        status = DependencyStatus(obj.get("status", "proposed"))
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    score = obj.get("score")
    if score is None:
        score = 1.0 if status == DependencyStatus.ACCEPTED else 0.0
    return Dependency(
        from_key=from_key,
        to_key=to_key,
        dep_type=dep_type,
        status=status,
        score=float(score),
        created=obj.get("created", ""),
    )


def issue_to_json(issue: Issue) -> dict:
    obj: dict = {
        "key": issue.key,
        "project": issue.project,
        "title": issue.title,
        "description": issue.description,
        "comments": issue.comments,
        "type": issue.issue_type.value,
        "status": issue.status,
    }
    if issue.resolution is not None:
        obj["resolution"] = issue.resolution
    if issue.priority is not None:
        obj["priority"] = issue.priority
    if issue.release is not None:
        obj["release"] = str(issue.release)
    obj["created"] = issue.created
    obj["modified"] = issue.modified
    for name in sorted(issue.custom):
        obj[name] = issue.custom[name]
    return obj


def dependency_to_json(dep: Dependency) -> dict:
    obj: dict = {
        "from": dep.from_key,
        "to": dep.to_key,
        "dep_type": dep.dep_type.value,
        "status": dep.status.value,
        "score": dep.score,
    }
    if dep.created:
        obj["created"] = dep.created
    return obj


def decision_to_json(record: DecisionRecord) -> dict:
    obj: dict = {
        "from": record.from_key,
        "to": record.to_key,
        "verdict": record.verdict.value,
    }
    if record.dep_type is not None:
        obj["dep_type"] = record.dep_type.value
    obj["actor"] = record.actor
    obj["at"] = record.at
    return obj


def parse_decision_line(obj: dict) -> DecisionRecord:
    dep_type = obj.get("dep_type")
    return DecisionRecord(
        from_key=obj["from"],
        to_key=obj["to"],
        verdict=DecisionVerdict(obj["verdict"]),
        dep_type=DependencyType(dep_type) if dep_type else None,
        actor=obj.get("actor", ""),
        at=obj.get("at", ""),
    )


def _iter_jsonl(stream: IO[str] | Iterable[str]):
    """Yield (line_number, parsed_or_error)."""
    for number, line in enumerate(stream, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            yield number, json.loads(text), None
        except json.JSONDecodeError as exc:
            yield number, None, str(exc)


class Store:
    """Single-writer / multi-reader repository holder.

    Readers grab the current Repository snapshot; every write builds or
    mutates under a lock and swaps the reference.
    """

    def __init__(self, data_dir: str | Path | None = None):
        self._lock = threading.Lock()
        self._repo = Repository()
        self.data_dir = Path(data_dir) if data_dir else None

    @property
    def repository(self) -> Repository:
        return self._repo

    # -- snapshot import ---------------------------------------------------

    def import_snapshot(
        self,
        issues_stream: IO[str] | Iterable[str],
        deps_stream: IO[str] | Iterable[str],
    ) -> ImportReport:
        """Replace the repository from two JSONL streams, atomically."""
        report = ImportReport()
        fresh = Repository()
        for number, obj, err in _iter_jsonl(issues_stream):
            if err is not None:
                report.errors.append(ParseIssue(number, err))
                continue
            try:
                issue = parse_issue_line(obj)
            except ValidationError as exc:
                report.errors.append(ParseIssue(number, str(exc)))
                continue
            fresh.issues[issue.key] = issue
            report.issues += 1
        for number, obj, err in _iter_jsonl(deps_stream):
            if err is not None:
                report.errors.append(ParseIssue(number, err))
                continue
            try:
                dep = parse_dependency_line(obj)
            except ValidationError as exc:
                report.errors.append(ParseIssue(number, str(exc)))
                continue
            if dep.from_key not in fresh.issues or dep.to_key not in fresh.issues:
                report.dropped += 1
                continue
            fresh.dependencies.append(dep)
            report.dependencies += 1
        with self._lock:
            fresh.decisions = list(self._repo.decisions)
            self._repo = fresh
        return report

    # -- incremental update --------------------------------------------------

    def apply_update(
        self,
        issues_stream: IO[str] | Iterable[str],
        deps_stream: IO[str] | Iterable[str],
    ) -> UpdateReport:
        """Upsert issues by key and dependencies by (from, to, dep_type).

        The report lists only keys whose fields actually changed, so
        detectors can re-run on the delta alone.
        """
        report = UpdateReport()
        new_issues: list[Issue] = []
        new_deps: list[Dependency] = []
        for number, obj, err in _iter_jsonl(issues_stream):
            if err is not None:
                report.errors.append(ParseIssue(number, err))
                continue
            try:
                new_issues.append(parse_issue_line(obj))
            except ValidationError as exc:
                report.errors.append(ParseIssue(number, str(exc)))
        for number, obj, err in _iter_jsonl(deps_stream):
            if err is not None:
                report.errors.append(ParseIssue(number, err))
                continue
            try:
                new_deps.append(parse_dependency_line(obj))
            except ValidationError as exc:
                report.errors.append(ParseIssue(number, str(exc)))
        with self._lock:
            repo = Repository(
                issues=dict(self._repo.issues),
                dependencies=list(self._repo.dependencies),
                decisions=list(self._repo.decisions),
                last_import=self._repo.last_import,
            )
            rejected = repo.rejected_pairs()
            for issue in new_issues:
                old = repo.issues.get(issue.key)
                if old is not None and old == issue:
                    continue
                repo.issues[issue.key] = issue
                report.changed_issue_keys.append(issue.key)
            by_slot = {
                (d.pair, d.dep_type): idx
                for idx, d in enumerate(repo.dependencies)
            }
            for dep in new_deps:
                if dep.from_key not in repo.issues or dep.to_key not in repo.issues:
                    report.errors.append(
                        ParseIssue(0, f"unknown endpoint in {dep.from_key}->{dep.to_key}")
                    )
                    continue
                slot = (dep.pair, dep.dep_type)
                idx = by_slot.get(slot)
                if idx is not None:
                    if repo.dependencies[idx] == dep:
                        continue
                    repo.dependencies[idx] = dep
                else:
                    by_slot[slot] = len(repo.dependencies)
                    repo.dependencies.append(dep)
                report.changed_dependencies.append(
                    (dep.from_key, dep.to_key, dep.dep_type.value)
                )
            changed = set(report.changed_issue_keys)
            for a, b in rejected:
                if a in changed or b in changed:
                    report.revisit_rejected.append((a, b))
            self._repo = repo
        return report

    # -- decisions ---------------------------------------------------------

    def record_decision(self, record: DecisionRecord) -> None:
        """Apply an accept/reject and append it to the decision log."""
        with self._lock:
            repo = self._repo
            if record.from_key not in repo.issues:
                raise UnknownIssueError(record.from_key)
            if record.to_key not in repo.issues:
                raise UnknownIssueError(record.to_key)
            repo = Repository(
                issues=repo.issues,
                dependencies=list(repo.dependencies),
                decisions=list(repo.decisions),
                last_import=repo.last_import,
            )
            repo.decisions.append(record)
            if record.verdict == DecisionVerdict.ACCEPT:
                accepted = Dependency(
                    from_key=record.from_key,
                    to_key=record.to_key,
                    dep_type=record.dep_type,
                    status=DependencyStatus.ACCEPTED,
                    score=1.0,
                    created=record.at,
                )
                slot = (accepted.pair, accepted.dep_type)
                for idx, dep in enumerate(repo.dependencies):
                    if (dep.pair, dep.dep_type) == slot:
                        repo.dependencies[idx] = accepted
                        break
                else:
                    repo.dependencies.append(accepted)
            self._repo = repo
            if self.data_dir is not None:
                self._append_decision(record)

    def _append_decision(self, record: DecisionRecord) -> None:
        path = self.data_dir / DECISIONS_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(decision_to_json(record)) + "\n")

    # -- file round trips ----------------------------------------------------

    def import_files(self, data_dir: str | Path | None = None) -> ImportReport:
        base = Path(data_dir) if data_dir else self.data_dir
        if base is None:
            raise ValidationError("no data directory configured")
        issues_path = base / ISSUES_FILE
        deps_path = base / DEPENDENCIES_FILE
        issues_text = issues_path.read_text(encoding="utf-8") if issues_path.exists() else ""
        deps_text = deps_path.read_text(encoding="utf-8") if deps_path.exists() else ""
        report = self.import_snapshot(
            io.StringIO(issues_text), io.StringIO(deps_text)
        )
        decisions_path = base / DECISIONS_FILE
        if decisions_path.exists():
            decisions = []
            with decisions_path.open(encoding="utf-8") as fh:
                for number, obj, err in _iter_jsonl(fh):
                    if err is not None:
                        report.errors.append(ParseIssue(number, err))
                        continue
                    try:
                        decisions.append(parse_decision_line(obj))
                    except (KeyError, ValueError) as exc:
                        report.errors.append(ParseIssue(number, str(exc)))
            with self._lock:
                repo = self._repo
                repo.decisions = decisions
                self._replay_accepts(repo)
        return report

    @staticmethod
    def _replay_accepts(repo: Repository) -> None:
        """Re-apply accepted decisions onto the dependency list."""
        by_slot = {
            (d.pair, d.dep_type): idx for idx, d in enumerate(repo.dependencies)
        }
        for record in repo.decisions:
            if record.verdict != DecisionVerdict.ACCEPT:
                continue
            if record.from_key not in repo.issues or record.to_key not in repo.issues:
                continue
            accepted = Dependency(
                from_key=record.from_key,
                to_key=record.to_key,
                dep_type=record.dep_type,
                status=DependencyStatus.ACCEPTED,
                score=1.0,
                created=record.at,
            )
            slot = (accepted.pair, accepted.dep_type)
            idx = by_slot.get(slot)
            if idx is not None:
                repo.dependencies[idx] = accepted
            else:
                by_slot[slot] = len(repo.dependencies)
                repo.dependencies.append(accepted)

    def export_files(self, data_dir: str | Path | None = None) -> None:
        """Write canonical JSONL (fixed field order, sorted issue keys)."""
        base = Path(data_dir) if data_dir else self.data_dir
        if base is None:
            raise ValidationError("no data directory configured")
        base.mkdir(parents=True, exist_ok=True)
        repo = self._repo
        with (base / ISSUES_FILE).open("w", encoding="utf-8") as fh:
            for key in sorted(repo.issues):
                fh.write(json.dumps(issue_to_json(repo.issues[key])) + "\n")
        with (base / DEPENDENCIES_FILE).open("w", encoding="utf-8") as fh:
            for dep in sorted(
                repo.dependencies,
                key=lambda d: (d.from_key, d.to_key, d.dep_type.value),
            ):
                fh.write(json.dumps(dependency_to_json(dep)) + "\n")
        with (base / DECISIONS_FILE).open("w", encoding="utf-8") as fh:
            for record in repo.decisions:
                fh.write(json.dumps(decision_to_json(record)) + "\n")


def effective_dependencies(repo: Repository) -> list[Dependency]:
    """Dependencies with the decision log's rejections applied.

    Rejected pairs keep their records but flip to rejected status so the
    graph build never traverses them.
    """
    rejected = repo.rejected_pairs()
    out = []
    for dep in repo.dependencies:
        if dep.pair in rejected and dep.status != DependencyStatus.ACCEPTED:
            out.append(replace(dep, status=DependencyStatus.REJECTED))
        else:
            out.append(dep)
    return out
