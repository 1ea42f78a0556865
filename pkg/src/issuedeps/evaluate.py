"""Evaluation procedures: detector cross-validation, threshold tuning, and
the per-depth consistency sweep.

All randomness is seeded and every run is deterministic given its inputs, so
desk-scale experiments reproduce exactly.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import IO, Iterable

from . import dupdetect, refdetect
from .consistency import check_and_diagnose
from .graph import IssueGraph
from .model import Issue, ValidationError

COARSE_STEP = 0.1
FINE_STEP = 0.01
THRESHOLD_FLOOR = 0.1  # coarse grid floor; scores this low are noise


@dataclass
class LabeledPair:
    a: str
    b: str
    label: str

    @property
    def is_duplicate(self) -> bool:
        return self.label == "duplicate"


def load_pairs(stream: IO[str] | Iterable[str]) -> list[LabeledPair]:
    pairs = []
    for line in stream:
        text = line.strip()
        if not text:
            continue
        obj = json.loads(text)
        label = obj["label"]
        if label not in ("duplicate", "not_duplicate"):
            raise ValidationError(f"unknown label {label!r}")
        pairs.append(LabeledPair(a=obj["a"], b=obj["b"], label=label))
    return pairs


@dataclass
class DetectorMetrics:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    recall_defined: bool = True
    precision_defined: bool = True

    @property
    def accuracy(self) -> float:
        total = self.tp + self.fp + self.tn + self.fn
        return (self.tp + self.tn) / total if total else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def f_measure(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if (p + r) else 0.0


def confusion(predictions: list[bool], labels: list[bool]) -> DetectorMetrics:
    m = DetectorMetrics()
    for predicted, actual in zip(predictions, labels):
        if actual and predicted:
            m.tp += 1
        elif actual and not predicted:
            m.fn += 1
        elif not actual and predicted:
            m.fp += 1
        else:
            m.tn += 1
    m.recall_defined = (m.tp + m.fn) > 0
    m.precision_defined = (m.tp + m.fp) > 0
    return m


@dataclass
class PairScores:
    """Detector outputs precomputed for a labeled pair set."""

    cosine: dict[tuple[str, str], float]
    referenced: set[tuple[str, str]]

    def dup_prediction(self, pair: LabeledPair, thr: float) -> bool:
        return self.cosine.get(_norm(pair.a, pair.b), 0.0) >= thr

    def ref_prediction(self, pair: LabeledPair) -> bool:
        return _norm(pair.a, pair.b) in self.referenced


def _norm(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def score_pairs(issues: dict[str, Issue], pairs: list[LabeledPair]) -> PairScores:
    """Run both detectors once over the pair corpus."""
    model = dupdetect.build_model_for(issues.values())
    cosine = {}
    for pair in pairs:
        if pair.a not in issues or pair.b not in issues:
            raise ValidationError(f"pair references unknown issue: {pair}")
        cosine[_norm(pair.a, pair.b)] = dupdetect.cosine_sim(model, pair.a, pair.b)
    proposals, _ = refdetect.detect_references(
        list(issues.values()), {i.project for i in issues.values()}
    )
    referenced = {_norm(p.from_key, p.to_key) for p in proposals}
    return PairScores(cosine=cosine, referenced=referenced)


# ---------------------------------------------------------------------------
# Threshold tuning
# ---------------------------------------------------------------------------


@dataclass
class TuneResult:
    best_threshold: float
    best_f_measure: float
    curve: list[tuple[float, float]]  # (threshold, F) samples, ascending thr


def tune_threshold(
    scores: PairScores,
    pairs: list[LabeledPair],
    start_thr: float = 0.5,
) -> TuneResult:
    """Hill-climb the F-measure in +-0.1 steps, then refine to +-0.01.

    Ties break toward the smaller threshold; the sampled grid is clamped to
    [0.1, 1.0].
    """
    labels = [p.is_duplicate for p in pairs]
    samples: dict[float, float] = {}

    def f_at(thr: float) -> float:
        thr = round(thr, 2)
        if thr not in samples:
            preds = [scores.dup_prediction(p, thr) for p in pairs]
            samples[thr] = confusion(preds, labels).f_measure
        return samples[thr]

    current = min(max(round(start_thr, 2), THRESHOLD_FLOOR), 1.0)
    f_at(current)
    while True:
        neighbors = [
            round(current + step, 2)
            for step in (-COARSE_STEP, COARSE_STEP)
            if THRESHOLD_FLOOR <= round(current + step, 2) <= 1.0
        ]
        best = current
        for thr in sorted(neighbors):
            if f_at(thr) > f_at(best) or (
                f_at(thr) == f_at(best) and thr < best
            ):
                best = thr
        if best == current:
            break
        current = best
    lo = max(THRESHOLD_FLOOR, round(current - COARSE_STEP, 2))
    hi = min(1.0, round(current + COARSE_STEP, 2))
    thr = lo
    while thr <= hi + 1e-9:
        f_at(thr)
        thr = round(thr + FINE_STEP, 2)
    best_thr = min(
        samples, key=lambda t: (-samples[t], t)
    )
    return TuneResult(
        best_threshold=best_thr,
        best_f_measure=samples[best_thr],
        curve=sorted(samples.items()),
    )


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------


@dataclass
class CrossvalReport:
    k: int
    seed: int
    duplicate: DetectorMetrics
    reference: DetectorMetrics
    fold_thresholds: list[float] = field(default_factory=list)


def crossval(
    issues: dict[str, Issue],
    pairs: list[LabeledPair],
    k: int = 10,
    seed: int = 0,
    start_thr: float = 0.5,
) -> CrossvalReport:
    """Stratified k-fold evaluation of both detectors.

    The duplicate threshold is fitted on each fold's training pairs; the
    reference detector has no parameter and is scored as-is. Metrics pool
    the per-fold confusion counts.
    """
    positives = [p for p in pairs if p.is_duplicate]
    negatives = [p for p in pairs if not p.is_duplicate]
    if len(positives) < k or len(negatives) < k:
        raise ValidationError(
            f"need at least k={k} examples of each class, got "
            f"{len(positives)} positive / {len(negatives)} negative"
        )
    rng = random.Random(seed)
    rng.shuffle(positives)
    rng.shuffle(negatives)
    scores = score_pairs(issues, pairs)
    folds: list[list[LabeledPair]] = [[] for _ in range(k)]
    for idx, pair in enumerate(positives):
        folds[idx % k].append(pair)
    for idx, pair in enumerate(negatives):
        folds[idx % k].append(pair)
    dup_preds: list[bool] = []
    ref_preds: list[bool] = []
    labels: list[bool] = []
    thresholds = []
    for i in range(k):
        test = folds[i]
        train = [p for j, fold in enumerate(folds) if j != i for p in fold]
        tuned = tune_threshold(scores, train, start_thr)
        thresholds.append(tuned.best_threshold)
        for pair in test:
            labels.append(pair.is_duplicate)
            dup_preds.append(scores.dup_prediction(pair, tuned.best_threshold))
            ref_preds.append(scores.ref_prediction(pair))
    return CrossvalReport(
        k=k,
        seed=seed,
        duplicate=confusion(dup_preds, labels),
        reference=confusion(ref_preds, labels),
        fold_thresholds=thresholds,
    )


def evaluate_detectors(
    issues: dict[str, Issue], pairs: list[LabeledPair], thr: float
) -> tuple[DetectorMetrics, DetectorMetrics]:
    """Single-shot metrics (no folds) at a fixed duplicate threshold."""
    scores = score_pairs(issues, pairs)
    labels = [p.is_duplicate for p in pairs]
    dup = confusion([scores.dup_prediction(p, thr) for p in pairs], labels)
    ref = confusion([scores.ref_prediction(p) for p in pairs], labels)
    return dup, ref


# ---------------------------------------------------------------------------
# Consistency sweep
# ---------------------------------------------------------------------------


@dataclass
class SweepRow:
    depth: int
    graphs: int
    requires_inconsistent_avg: float
    parent_child_inconsistent_avg: float
    consistency_pct: float
    issue_diag_count_avg: float
    issue_diag_success_pct: float
    dep_diag_count_avg: float
    dep_diag_success_pct: float

    CSV_HEADER = (
        "depth,graphs,requires_inconsistent_avg,parent_child_inconsistent_avg,"
        "consistency_pct,issue_diag_count_avg,issue_diag_success_pct,"
        "dep_diag_count_avg,dep_diag_success_pct"
    )

    def csv_line(self) -> str:
        return (
            f"{self.depth},{self.graphs},{self.requires_inconsistent_avg:.3f},"
            f"{self.parent_child_inconsistent_avg:.3f},{self.consistency_pct:.1f},"
            f"{self.issue_diag_count_avg:.3f},{self.issue_diag_success_pct:.1f},"
            f"{self.dep_diag_count_avg:.3f},{self.dep_diag_success_pct:.1f}"
        )


def sweep_consistency(
    g: IssueGraph,
    max_depth: int = 10,
    time_limit: float = 5.0,
    run_diagnosis: bool = True,
    sample: list[str] | None = None,
) -> list[SweepRow]:
    """Check (and diagnose, when inconsistent) every p-depth issue graph.

    Diagnosis success means finishing inside the time limit; averages for the
    diagnosis counts are taken over successful diagnoses.
    """
    centers = sample if sample is not None else sorted(g.issues)
    rows = []
    for depth in range(1, max_depth + 1):
        req_counts = []
        pc_counts = []
        consistent_count = 0
        issue_counts = []
        dep_counts = []
        diag_attempts = 0
        issue_success = 0
        dep_success = 0
        for center in centers:
            result = check_and_diagnose(
                g, center, depth, run_diagnosis=run_diagnosis, time_limit=time_limit
            )
            req = sum(1 for v in result.violations if v.rule == "requires_rule")
            pc = sum(1 for v in result.violations if v.rule == "parent_child_rule")
            req_counts.append(req)
            pc_counts.append(pc)
            if result.consistent:
                consistent_count += 1
                continue
            if not run_diagnosis:
                continue
            diag_attempts += 1
            if not result.dep_diag_timed_out:
                dep_success += 1
                dep_counts.append(len(result.diag_dependencies))
            if not result.issue_diag_timed_out:
                issue_success += 1
                issue_counts.append(len(result.diag_issues))
        n = len(centers)
        rows.append(
            SweepRow(
                depth=depth,
                graphs=n,
                requires_inconsistent_avg=sum(req_counts) / n if n else 0.0,
                parent_child_inconsistent_avg=sum(pc_counts) / n if n else 0.0,
                consistency_pct=100.0 * consistent_count / n if n else 0.0,
                issue_diag_count_avg=(
                    sum(issue_counts) / len(issue_counts) if issue_counts else 0.0
                ),
                issue_diag_success_pct=(
                    100.0 * issue_success / diag_attempts if diag_attempts else 100.0
                ),
                dep_diag_count_avg=(
                    sum(dep_counts) / len(dep_counts) if dep_counts else 0.0
                ),
                dep_diag_success_pct=(
                    100.0 * dep_success / diag_attempts if diag_attempts else 100.0
                ),
            )
        )
    return rows
