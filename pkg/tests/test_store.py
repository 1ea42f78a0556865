import io
import json

import pytest

from issuedeps.model import (
    DecisionRecord,
    DecisionVerdict,
    DependencyStatus,
    DependencyType,
    UnknownIssueError,
    ValidationError,
)
from issuedeps.store import Store, effective_dependencies


def issue_line(key, **kw):
    obj = {
        "key": key,
        "title": kw.pop("title", f"title {key}"),
        "description": kw.pop("description", ""),
        "comments": kw.pop("comments", []),
        "type": kw.pop("type", "bug"),
        "status": kw.pop("status", "Open"),
        "created": "2024-01-01T00:00:00Z",
        "modified": "2024-01-01T00:00:00Z",
    }
    obj.update(kw)
    return json.dumps(obj)


def dep_line(a, b, dep_type="relates", status="accepted", **kw):
    obj = {"from": a, "to": b, "dep_type": dep_type, "status": status}
    obj.update(kw)
    return json.dumps(obj)


def test_import_empty():
    store = Store()
    report = store.import_snapshot(io.StringIO(""), io.StringIO(""))
    assert (report.issues, report.dependencies, report.dropped) == (0, 0, 0)
    assert store.repository.issues == {}


def test_import_counts():
    store = Store()
    issues = "\n".join([issue_line("A-1"), issue_line("A-2")])
    deps = dep_line("A-1", "A-2")
    report = store.import_snapshot(io.StringIO(issues), io.StringIO(deps))
    assert (report.issues, report.dependencies, report.dropped) == (2, 1, 0)


def test_import_skips_invalid_priority():
    store = Store()
    issues = "\n".join(
        [issue_line("A-1"), issue_line("A-2", priority=-1)]
    )
    report = store.import_snapshot(io.StringIO(issues), io.StringIO(""))
    assert report.issues == 1
    assert len(report.errors) == 1
    assert report.errors[0].line == 2


def test_import_skips_malformed_json_line():
    store = Store()
    issues = issue_line("A-1") + "\n{not json}\n"
    report = store.import_snapshot(io.StringIO(issues), io.StringIO(""))
    assert report.issues == 1
    assert len(report.errors) == 1


def test_import_drops_dangling_dependency():
    store = Store()
    report = store.import_snapshot(
        io.StringIO(issue_line("A-1")), io.StringIO(dep_line("A-1", "A-9"))
    )
    assert report.dropped == 1
    assert store.repository.dependencies == []


def test_import_rejects_oversize_version_part():
    store = Store()
    report = store.import_snapshot(
        io.StringIO(issue_line("A-1", release="1.1000")), io.StringIO("")
    )
    assert report.issues == 0
    assert "999" in report.errors[0].message


def test_import_preserves_custom_fields():
    store = Store()
    store.import_snapshot(
        io.StringIO(issue_line("A-1", environment="linux")), io.StringIO("")
    )
    assert store.repository.issues["A-1"].custom == {"environment": "linux"}


def test_io_failure_keeps_previous_state():
    store = Store()
    store.import_snapshot(io.StringIO(issue_line("A-1")), io.StringIO(""))

    class Exploding:
        def __iter__(self):
            return self

        def __next__(self):
            raise OSError("disk gone")

    with pytest.raises(OSError):
        store.import_snapshot(Exploding(), io.StringIO(""))
    assert set(store.repository.issues) == {"A-1"}


def test_roundtrip_canonical(tmp_path):
    store = Store(tmp_path)
    issues = "\n".join(
        [
            issue_line("B-2", priority=3, release="5.12", resolution="Done"),
            issue_line("B-1", environment="win"),
        ]
    )
    deps = dep_line("B-2", "B-1", "requires", score=1.0)
    store.import_snapshot(io.StringIO(issues), io.StringIO(deps))
    store.export_files()
    first = {
        name: (tmp_path / name).read_text()
        for name in ("issues.jsonl", "dependencies.jsonl")
    }
    store2 = Store(tmp_path)
    store2.import_files()
    store2.export_files()
    second = {
        name: (tmp_path / name).read_text()
        for name in ("issues.jsonl", "dependencies.jsonl")
    }
    assert first == second


def test_update_reports_changed_keys_only():
    store = Store()
    store.import_snapshot(
        io.StringIO("\n".join([issue_line("A-1"), issue_line("A-2")])),
        io.StringIO(""),
    )
    update = "\n".join(
        [
            issue_line("A-1"),  # identical -> not a change
            issue_line("A-2", title="new title"),
            issue_line("A-3"),
        ]
    )
    report = store.apply_update(io.StringIO(update), io.StringIO(""))
    assert report.changed_issue_keys == ["A-2", "A-3"]


def test_update_is_idempotent():
    store = Store()
    store.import_snapshot(io.StringIO(issue_line("A-1")), io.StringIO(""))
    update_issues = "\n".join([issue_line("A-2"), issue_line("A-3")])
    update_deps = dep_line("A-2", "A-3")
    store.apply_update(io.StringIO(update_issues), io.StringIO(update_deps))
    snapshot1 = (
        dict(store.repository.issues),
        list(store.repository.dependencies),
    )
    report2 = store.apply_update(io.StringIO(update_issues), io.StringIO(update_deps))
    assert report2.changed_issue_keys == []
    assert report2.changed_dependencies == []
    assert (dict(store.repository.issues), list(store.repository.dependencies)) == snapshot1


def test_update_adds_new_project_for_reference_detection():
    from issuedeps.refdetect import detect_references

    store = Store()
    store.import_snapshot(
        io.StringIO(issue_line("OLD-1", comments=["see NEW-1 maybe"])),
        io.StringIO(""),
    )
    proposals, _ = detect_references(
        list(store.repository.issues.values()),
        store.repository.project_ids(),
        known_keys=set(store.repository.issues),
    )
    assert proposals == []  # NEW not yet a known project / key
    store.apply_update(io.StringIO(issue_line("NEW-1")), io.StringIO(""))
    assert "NEW" in store.repository.project_ids()
    proposals, _ = detect_references(
        list(store.repository.issues.values()),
        store.repository.project_ids(),
        known_keys=set(store.repository.issues),
    )
    assert [(p.from_key, p.to_key) for p in proposals] == [("OLD-1", "NEW-1")]


def test_update_upserts_dependency_by_slot():
    store = Store()
    store.import_snapshot(
        io.StringIO("\n".join([issue_line("A-1"), issue_line("A-2")])),
        io.StringIO(dep_line("A-1", "A-2", "relates", "proposed", score=0.4)),
    )
    store.apply_update(
        io.StringIO(""),
        io.StringIO(dep_line("A-1", "A-2", "relates", "accepted", score=1.0)),
    )
    [d] = store.repository.dependencies
    assert d.status == DependencyStatus.ACCEPTED
    assert d.score == 1.0


def test_record_decision_accept_upserts_dependency():
    store = Store()
    store.import_snapshot(
        io.StringIO("\n".join([issue_line("A-1"), issue_line("A-2")])),
        io.StringIO(""),
    )
    store.record_decision(
        DecisionRecord(
            from_key="A-1",
            to_key="A-2",
            verdict=DecisionVerdict.ACCEPT,
            dep_type=DependencyType.REQUIRES,
            actor="tester",
            at="2024-02-02T00:00:00Z",
        )
    )
    [d] = store.repository.dependencies
    assert d.status == DependencyStatus.ACCEPTED
    assert d.score == 1.0
    assert d.dep_type == DependencyType.REQUIRES


def test_record_decision_unknown_key():
    store = Store()
    store.import_snapshot(io.StringIO(issue_line("A-1")), io.StringIO(""))
    with pytest.raises(UnknownIssueError):
        store.record_decision(
            DecisionRecord(
                from_key="A-1", to_key="A-9", verdict=DecisionVerdict.REJECT
            )
        )


def test_rejected_set_is_fold_of_log():
    store = Store()
    store.import_snapshot(
        io.StringIO("\n".join([issue_line("A-1"), issue_line("A-2")])),
        io.StringIO(""),
    )
    reject = DecisionRecord(
        from_key="A-1", to_key="A-2", verdict=DecisionVerdict.REJECT
    )
    store.record_decision(reject)
    assert store.repository.rejected_pairs() == {("A-1", "A-2")}
    # later accept supersedes the rejection (last writer wins on the pair)
    store.record_decision(
        DecisionRecord(
            from_key="A-2",
            to_key="A-1",
            verdict=DecisionVerdict.ACCEPT,
            dep_type=DependencyType.RELATES,
        )
    )
    assert store.repository.rejected_pairs() == set()

    # oracle: replay the append-only log independently
    state = {}
    for record in store.repository.decisions:
        state[record.pair] = record.verdict
    expected = {p for p, v in state.items() if v == DecisionVerdict.REJECT}
    assert store.repository.rejected_pairs() == expected


def test_effective_dependencies_flip_rejected():
    store = Store()
    store.import_snapshot(
        io.StringIO("\n".join([issue_line("A-1"), issue_line("A-2")])),
        io.StringIO(dep_line("A-1", "A-2", "relates", "proposed", score=0.5)),
    )
    store.record_decision(
        DecisionRecord(from_key="A-1", to_key="A-2", verdict=DecisionVerdict.REJECT)
    )
    [d] = effective_dependencies(store.repository)
    assert d.status == DependencyStatus.REJECTED


def test_update_flags_rejected_pairs_whose_issues_changed():
    # rejections stay sticky, but the report flags them for human review
    store = Store()
    store.import_snapshot(
        io.StringIO("\n".join([issue_line("A-1"), issue_line("A-2")])),
        io.StringIO(""),
    )
    store.record_decision(
        DecisionRecord(from_key="A-1", to_key="A-2", verdict=DecisionVerdict.REJECT)
    )
    report = store.apply_update(
        io.StringIO(issue_line("A-2", title="edited")), io.StringIO("")
    )
    assert report.revisit_rejected == [("A-1", "A-2")]
    assert store.repository.rejected_pairs() == {("A-1", "A-2")}


def test_decision_log_persists(tmp_path):
    store = Store(tmp_path)
    store.import_snapshot(
        io.StringIO("\n".join([issue_line("A-1"), issue_line("A-2")])),
        io.StringIO(""),
    )
    store.export_files()
    store.record_decision(
        DecisionRecord(
            from_key="A-1",
            to_key="A-2",
            verdict=DecisionVerdict.ACCEPT,
            dep_type=DependencyType.TESTS,
            actor="t",
            at="2024-01-02T00:00:00Z",
        )
    )
    reloaded = Store(tmp_path)
    reloaded.import_files()
    assert len(reloaded.repository.decisions) == 1
    [d] = reloaded.repository.dependencies
    assert d.dep_type == DependencyType.TESTS
    assert d.status == DependencyStatus.ACCEPTED
