"""Query orchestration over one repository.

The engine owns a Store plus a derived snapshot (graph, TF-IDF model,
detector outputs). Writes rebuild the snapshot and swap it in whole, so
readers never observe a half-updated state. Updates re-run the detectors on
the changed issues only, against the frozen idf table; imports re-fit
everything.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

from . import dupdetect, refdetect
from .dupdetect import Cluster, DuplicateProposal, TfidfModel
from .graph import IssueGraph, build_graph
from .model import DecisionRecord
from .proposals import ContextParams, RankedProposal, proposals_for
from .refdetect import ReferenceProposal
from .store import ImportReport, Store, UpdateReport, effective_dependencies

DEFAULT_DUP_THRESHOLD = 0.5


@dataclass
class EngineSnapshot:
    graph: IssueGraph
    model: TfidfModel | None = None
    ref_proposals: list[ReferenceProposal] = field(default_factory=list)
    dup_proposals: list[DuplicateProposal] = field(default_factory=list)
    clusters: list[Cluster] = field(default_factory=list)
    dangling_references: int = 0


class Engine:
    def __init__(
        self,
        data_dir: str | Path | None = None,
        dup_threshold: float = DEFAULT_DUP_THRESHOLD,
        run_detectors: bool = True,
    ):
        self.store = Store(data_dir)
        self.dup_threshold = dup_threshold
        self.run_detectors = run_detectors
        self._write_lock = threading.Lock()
        self._snapshot = EngineSnapshot(graph=build_graph([], []))

    @property
    def snapshot(self) -> EngineSnapshot:
        return self._snapshot

    @property
    def graph(self) -> IssueGraph:
        return self._snapshot.graph

    # -- lifecycle -----------------------------------------------------------

    def load_data_dir(self) -> ImportReport:
        report = self.store.import_files()
        self._rebuild_full()
        return report

    def import_snapshot(
        self,
        issues_stream: IO[str] | Iterable[str],
        deps_stream: IO[str] | Iterable[str],
    ) -> ImportReport:
        with self._write_lock:
            report = self.store.import_snapshot(issues_stream, deps_stream)
            self._rebuild_full()
            if self.store.data_dir is not None:
                self.store.export_files()
        return report

    def apply_update(
        self,
        issues_stream: IO[str] | Iterable[str],
        deps_stream: IO[str] | Iterable[str],
    ) -> UpdateReport:
        with self._write_lock:
            report = self.store.apply_update(issues_stream, deps_stream)
            self._rebuild_after_update(report)
            if self.store.data_dir is not None:
                self.store.export_files()
        return report

    def record_decision(self, record: DecisionRecord) -> None:
        with self._write_lock:
            self.store.record_decision(record)
            self._rebuild_graph_only()

    # -- rebuild strategies ----------------------------------------------------

    def _build_graph(self) -> IssueGraph:
        repo = self.store.repository
        return build_graph(
            list(repo.issues.values()), effective_dependencies(repo)
        )

    def _rebuild_graph_only(self) -> None:
        old = self._snapshot
        self._snapshot = EngineSnapshot(
            graph=self._build_graph(),
            model=old.model,
            ref_proposals=old.ref_proposals,
            dup_proposals=old.dup_proposals,
            clusters=old.clusters,
            dangling_references=old.dangling_references,
        )

    def _rebuild_full(self) -> None:
        graph = self._build_graph()
        snapshot = EngineSnapshot(graph=graph)
        if self.run_detectors and graph.issues:
            issues = list(graph.issues.values())
            snapshot.ref_proposals, snapshot.dangling_references = (
                refdetect.detect_references(
                    issues, self.store.repository.project_ids()
                )
            )
            snapshot.model = dupdetect.build_model_for(issues)
            snapshot.dup_proposals, snapshot.clusters = dupdetect.detect_duplicates(
                graph, self.dup_threshold, model=snapshot.model
            )
        self._snapshot = snapshot

    def _rebuild_after_update(self, report: UpdateReport) -> None:
        old = self._snapshot
        graph = self._build_graph()
        if not self.run_detectors or old.model is None:
            self._snapshot = EngineSnapshot(graph=graph)
            if self.run_detectors and graph.issues:
                self._rebuild_full()
            return
        changed = set(report.changed_issue_keys)
        issues = list(graph.issues.values())
        # references are a cheap full rescan; new keys can resolve mentions
        # that dangled before this update
        ref_proposals, dangling = refdetect.detect_references(
            issues, self.store.repository.project_ids()
        )
        model = old.model.with_updates(
            dupdetect.text_preprocess(graph.issues[k])
            for k in changed
            if k in graph.issues
        )
        fresh_props, _ = dupdetect.detect_duplicates(
            graph, self.dup_threshold, model=model, involving=changed
        )
        existing = {
            ((k, e.neighbor) if k <= e.neighbor else (e.neighbor, k))
            for k, es in graph.adjacency.items()
            for e in es
        }
        kept = [
            p
            for p in old.dup_proposals
            if p.a not in changed
            and p.b not in changed
            and p.pair not in existing
            and p.a in graph.issues
            and p.b in graph.issues
        ]
        dup_proposals = sorted(kept + fresh_props, key=lambda p: (p.a, p.b))
        clusters = dupdetect.compute_clusters(graph, dup_proposals)
        self._snapshot = EngineSnapshot(
            graph=graph,
            model=model,
            ref_proposals=ref_proposals,
            dup_proposals=dup_proposals,
            clusters=clusters,
            dangling_references=dangling,
        )

    # -- queries -------------------------------------------------------------

    def ranked_proposals(self, r0: str, params: ContextParams) -> list[RankedProposal]:
        # existing = accepted records only: a stored proposal is exactly what
        # is being (re-)ranked here, so it must not suppress itself
        snap = self._snapshot
        repo = self.store.repository
        return proposals_for(
            r0,
            snap.graph,
            snap.ref_proposals,
            snap.dup_proposals,
            repo.accepted_pairs(),
            repo.rejected_pairs(),
            params,
        )

    def detector_edges(self, members: set[str]) -> list[DuplicateProposal | ReferenceProposal]:
        """Detector proposals touching the given nodes, for dashed display."""
        snap = self._snapshot
        rejected = self.store.repository.rejected_pairs()
        existing = self.store.repository.dependency_pairs()
        out: list = []
        for ref in snap.ref_proposals:
            pair = (
                (ref.from_key, ref.to_key)
                if ref.from_key <= ref.to_key
                else (ref.to_key, ref.from_key)
            )
            if pair in rejected or pair in existing:
                continue
            if ref.from_key in members and ref.to_key in members:
                out.append(ref)
        for dup in snap.dup_proposals:
            if dup.pair in rejected or dup.pair in existing:
                continue
            if dup.a in members and dup.b in members:
                out.append(dup)
        return out
