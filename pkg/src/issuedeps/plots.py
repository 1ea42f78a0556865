"""Figure rendering for the report paths.

Every report command can write PNG figures next to its CSV output. All
functions take the already-computed data and a target path; nothing here
recomputes analysis results.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluate import CrossvalReport, SweepRow, TuneResult
from .graph import TopologyReport


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_degree_histogram(report: TopologyReport, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    degrees = sorted(report.degree_histogram)
    counts = [report.degree_histogram[d] for d in degrees]
    ax.bar(degrees, counts, color="#4878a8")
    ax.set_xlabel("dependencies per issue")
    ax.set_ylabel("issues")
    ax.set_title(
        f"Dependency counts (avg {report.dependencies_avg:.2f}, "
        f"median {report.dependencies_median:g}, max {report.dependencies_max})"
    )
    return _save(fig, path)


def save_component_sizes(report: TopologyReport, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    sizes = report.component_sizes[:50]
    ax.bar(range(1, len(sizes) + 1), sizes, color="#6aa84f")
    ax.set_xlabel("component rank")
    ax.set_ylabel("issues in component")
    ax.set_title(
        f"Component sizes ({report.component_count} components, "
        f"{report.orphan_count} orphans = {report.orphan_fraction:.0%})"
    )
    if sizes and sizes[0] > 100:
        ax.set_yscale("log")
    return _save(fig, path)


def save_sweep_curves(rows: list[SweepRow], path: str | Path) -> Path:
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    depths = [r.depth for r in rows]
    top.plot(depths, [r.requires_inconsistent_avg for r in rows], "o-",
             label="requires inconsistent (avg)")
    top.plot(depths, [r.parent_child_inconsistent_avg for r in rows], "s-",
             label="parent-child inconsistent (avg)")
    top.set_ylabel("violations per graph")
    top.legend()
    top.set_title("Consistency sweep by depth")
    bottom.plot(depths, [r.consistency_pct for r in rows], "o-",
                label="consistent graphs %")
    bottom.plot(depths, [r.issue_diag_success_pct for r in rows], "^-",
                label="issue diagnosis success %")
    bottom.plot(depths, [r.dep_diag_success_pct for r in rows], "v-",
                label="dependency diagnosis success %")
    bottom.set_xlabel("depth p")
    bottom.set_ylabel("percent")
    bottom.set_ylim(-5, 105)
    bottom.legend()
    return _save(fig, path)


def save_f_curve(result: TuneResult, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    thresholds = [t for t, _ in result.curve]
    values = [f for _, f in result.curve]
    ax.plot(thresholds, values, "o-", color="#4878a8")
    ax.axvline(result.best_threshold, color="#cc4125", linestyle="--",
               label=f"best {result.best_threshold:.2f} (F={result.best_f_measure:.3f})")
    ax.set_xlabel("similarity threshold")
    ax.set_ylabel("F-measure")
    ax.set_title("Threshold tuning curve")
    ax.legend()
    return _save(fig, path)


def save_crossval_bars(report: CrossvalReport, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    metrics = ["accuracy", "recall", "precision", "f_measure"]
    ref = [getattr(report.reference, m) for m in metrics]
    dup = [getattr(report.duplicate, m) for m in metrics]
    x = range(len(metrics))
    ax.bar([i - 0.2 for i in x], ref, width=0.4, label="reference detection",
           color="#4878a8")
    ax.bar([i + 0.2 for i in x], dup, width=0.4, label="duplicate detection",
           color="#6aa84f")
    ax.set_xticks(list(x))
    ax.set_xticklabels(["accuracy", "recall", "precision", "F-measure"])
    ax.set_ylim(0, 1.05)
    ax.set_title(f"{report.k}-fold cross-validation")
    ax.legend()
    return _save(fig, path)
