"""Batch front door: imports, detector runs, analytics, evaluation, serve.

Report commands write delimited output (CSV/JSONL) and, when --out points at
a directory, render the matching matplotlib figures next to it.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import evaluate, plots
from .consistency import check_and_diagnose
from .dupdetect import build_model_for, detect_duplicates
from .engine import DEFAULT_DUP_THRESHOLD, Engine
from .generate import build_perf_repo, generate_repository, write_jsonl
from .graph import graph_stats
from .model import UnknownIssueError, ValidationError
from .proposals import ContextParams, PropertyRule
from .refdetect import detect_references
from .store import Store


@click.group()
@click.option(
    "--data",
    "data_dir",
    envvar="DEPGRAPH_DATA_DIR",
    default="data",
    show_default=True,
    help="Repository directory (issues.jsonl, dependencies.jsonl, decisions.jsonl).",
)
@click.pass_context
def main(ctx: click.Context, data_dir: str) -> None:
    """Issue-dependency analysis engine."""
    ctx.ensure_object(dict)
    ctx.obj["data_dir"] = Path(data_dir)


def _store(ctx: click.Context) -> Store:
    store = Store(ctx.obj["data_dir"])
    report = store.import_files()
    if report.errors:
        click.echo(f"warning: {len(report.errors)} parse errors", err=True)
    return store


def _graph(ctx: click.Context):
    from .graph import build_graph
    from .store import effective_dependencies

    store = _store(ctx)
    repo = store.repository
    return store, build_graph(
        list(repo.issues.values()), effective_dependencies(repo)
    )


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2))


@main.command("import")
@click.option("--issues", "issues_file", type=click.Path(exists=True), required=False)
@click.option("--deps", "deps_file", type=click.Path(exists=True), required=False)
@click.pass_context
def import_cmd(ctx: click.Context, issues_file: str | None, deps_file: str | None):
    """Import a snapshot into the data directory (atomic replace)."""
    data_dir = ctx.obj["data_dir"]
    store = Store(data_dir)
    if issues_file or deps_file:
        issues_text = Path(issues_file).read_text() if issues_file else ""
        deps_text = Path(deps_file).read_text() if deps_file else ""
        report = store.import_snapshot(
            issues_text.splitlines(), deps_text.splitlines()
        )
        store.export_files()
    else:
        report = store.import_files()
    _echo_json(
        {
            "issues": report.issues,
            "dependencies": report.dependencies,
            "dropped": report.dropped,
            "parse_errors": [
                {"line": e.line, "message": e.message} for e in report.errors
            ],
        }
    )


@main.command("update")
@click.option("--issues", "issues_file", type=click.Path(exists=True), required=False)
@click.option("--deps", "deps_file", type=click.Path(exists=True), required=False)
@click.pass_context
def update_cmd(ctx: click.Context, issues_file: str | None, deps_file: str | None):
    """Apply an incremental update (upsert by key)."""
    store = _store(ctx)
    issues_text = Path(issues_file).read_text() if issues_file else ""
    deps_text = Path(deps_file).read_text() if deps_file else ""
    report = store.apply_update(issues_text.splitlines(), deps_text.splitlines())
    store.export_files()
    _echo_json(
        {
            "changed_issues": report.changed_issue_keys,
            "changed_dependencies": [
                {"from": a, "to": b, "dep_type": t}
                for a, b, t in report.changed_dependencies
            ],
            "revisit_rejected": [list(p) for p in report.revisit_rejected],
            "parse_errors": [
                {"line": e.line, "message": e.message} for e in report.errors
            ],
        }
    )


@main.group()
def detect() -> None:
    """Run a detector over the repository."""


@detect.command("refs")
@click.option("--projects", default=None, help="Comma-separated acronyms; default: all in repo.")
@click.option("--since", default=None, help="Scan only issues modified at/after this timestamp.")
@click.option("--out", "out_file", type=click.Path(), default=None)
@click.pass_context
def detect_refs(ctx: click.Context, projects: str | None, since: str | None, out_file: str | None):
    """Reference detection; emits proposals as JSONL."""
    store = _store(ctx)
    repo = store.repository
    issues = list(repo.issues.values())
    if since:
        issues = [i for i in issues if i.modified >= since]
    project_ids = (
        {p.strip() for p in projects.split(",") if p.strip()}
        if projects
        else repo.project_ids()
    )
    proposals, dangling = detect_references(
        issues, project_ids, known_keys=set(repo.issues)
    )
    lines = [
        json.dumps(
            {
                "from": p.from_key,
                "to": p.to_key,
                "source_field": p.source_field,
                "matched_text": p.matched_text,
            }
        )
        for p in proposals
    ]
    _write_lines(lines, out_file)
    click.echo(
        f"# {len(proposals)} proposals, {dangling} dangling mentions dropped",
        err=True,
    )


@detect.command("dups")
@click.option("--thr", type=float, required=True, help="Similarity threshold in (0,1].")
@click.option("--exhaustive", is_flag=True, default=False,
              help="Score all pairs instead of inverted-index blocking.")
@click.option("--out", "out_file", type=click.Path(), default=None)
@click.pass_context
def detect_dups(ctx: click.Context, thr: float, exhaustive: bool, out_file: str | None):
    """Duplicate detection; emits proposals and clusters as JSONL."""
    _, g = _graph(ctx)
    try:
        proposals, clusters = detect_duplicates(g, thr, exhaustive=exhaustive)
    except ValidationError as exc:
        raise click.ClickException(str(exc))
    lines = [
        json.dumps({"kind": "proposal", "a": p.a, "b": p.b, "score": round(p.score, 6)})
        for p in proposals
    ]
    lines += [
        json.dumps(
            {
                "kind": "cluster",
                "members": c.members,
                "reported_edges": [
                    {"a": a, "b": b, "score": round(s, 6)}
                    for a, b, s in c.reported_edges
                ],
            }
        )
        for c in clusters
    ]
    _write_lines(lines, out_file)
    click.echo(f"# {len(proposals)} proposals in {len(clusters)} clusters", err=True)


@main.command("propose")
@click.argument("key")
@click.option("--min-depth", default=5, show_default=True)
@click.option("--f-depth", default=1.0, show_default=True)
@click.option("--f-orphan", default=1.0, show_default=True)
@click.option("--thr", default=DEFAULT_DUP_THRESHOLD, show_default=True,
              help="Duplicate detector threshold feeding the ranking.")
@click.option("--prop", "props", multiple=True,
              help="Property rule name:value:factor (repeatable).")
@click.pass_context
def propose_cmd(ctx, key, min_depth, f_depth, f_orphan, thr, props):
    """Ranked dependency proposals for one issue."""
    rules = []
    for raw in props:
        pieces = raw.split(":")
        if len(pieces) != 3:
            raise click.ClickException(f"malformed prop triple: {raw!r}")
        try:
            rules.append(PropertyRule(pieces[0], pieces[1], float(pieces[2])))
        except ValueError:
            raise click.ClickException(f"malformed prop factor: {raw!r}")
    engine = Engine(ctx.obj["data_dir"], dup_threshold=thr)
    engine.load_data_dir()
    try:
        ranked = engine.ranked_proposals(
            key,
            ContextParams(
                min_depth=min_depth,
                f_depth=f_depth,
                f_orphan=f_orphan,
                properties=rules,
            ),
        )
    except UnknownIssueError:
        raise click.ClickException(f"unknown issue: {key}")
    for p in ranked:
        click.echo(
            json.dumps(
                {
                    "from": p.from_key,
                    "to": p.to_key,
                    "base_score": round(p.base_score, 6),
                    "ranked_score": round(p.ranked_score, 6),
                    "origins": sorted(p.origins),
                    "applied_factors": [
                        {"label": label, "factor": factor}
                        for label, factor in p.applied_factors
                    ],
                }
            )
        )


@main.command("check")
@click.argument("key", required=False)
@click.option("--all", "check_all", is_flag=True, default=False,
              help="Sweep every issue instead of one key.")
@click.option("--depth", default=5, show_default=True)
@click.option("--max-depth", default=10, show_default=True,
              help="Sweep depth bound with --all.")
@click.option("--diagnose", "run_diagnosis", is_flag=True, default=False)
@click.option("--time-limit-ms", default=5000.0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.pass_context
def check_cmd(ctx, key, check_all, depth, max_depth, run_diagnosis, time_limit_ms, out_dir):
    """Consistency check (and optional diagnosis) for one issue, or a sweep."""
    _, g = _graph(ctx)
    if check_all:
        _run_sweep(g, max_depth, time_limit_ms / 1000.0, None, out_dir)
        return
    if not key:
        raise click.ClickException("provide an issue KEY or --all")
    if key not in g.issues:
        raise click.ClickException(f"unknown issue: {key}")
    result = check_and_diagnose(
        g, key, depth, run_diagnosis=run_diagnosis, time_limit=time_limit_ms / 1000.0
    )
    body = {
        "center": key,
        "depth": depth,
        "consistent": result.consistent,
        "violations": [
            {
                "from": v.dependency.from_key,
                "to": v.dependency.to_key,
                "dep_type": v.dependency.dep_type.value,
                "rule": v.rule,
                "detail": v.detail,
            }
            for v in result.violations
        ],
        "cross_project_skipped": result.cross_project_skipped,
        "elapsed_ms": round(result.elapsed * 1000.0, 3),
    }
    if run_diagnosis and not result.consistent:
        body["diag_dependencies"] = [
            {"from": d.from_key, "to": d.to_key, "dep_type": d.dep_type.value}
            for d in result.diag_dependencies
        ]
        body["diag_issues"] = result.diag_issues
        body["dep_diag_timed_out"] = result.dep_diag_timed_out
        body["issue_diag_timed_out"] = result.issue_diag_timed_out
    _echo_json(body)


@main.command("sweep")
@click.option("--max-depth", default=10, show_default=True)
@click.option("--time-limit-ms", default=5000.0, show_default=True)
@click.option("--sample", type=int, default=None,
              help="Sweep only the first N issues (sorted by key).")
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.pass_context
def sweep_cmd(ctx, max_depth, time_limit_ms, sample, out_dir):
    """Per-depth consistency/diagnosis sweep, Table-style CSV output."""
    _, g = _graph(ctx)
    centers = sorted(g.issues)[:sample] if sample else None
    _run_sweep(g, max_depth, time_limit_ms / 1000.0, centers, out_dir)


def _run_sweep(g, max_depth, time_limit, centers, out_dir):
    rows = evaluate.sweep_consistency(
        g, max_depth=max_depth, time_limit=time_limit, sample=centers
    )
    lines = [evaluate.SweepRow.CSV_HEADER] + [r.csv_line() for r in rows]
    if out_dir:
        base = Path(out_dir)
        base.mkdir(parents=True, exist_ok=True)
        (base / "sweep.csv").write_text("\n".join(lines) + "\n")
        plots.save_sweep_curves(rows, base / "sweep.png")
        click.echo(f"wrote {base / 'sweep.csv'} and sweep.png", err=True)
    for line in lines:
        click.echo(line)


@main.command("analyze")
@click.option("--p-min", default=None, type=int)
@click.option("--p-max", default=None, type=int)
@click.option("--sample", type=int, default=None,
              help="Compute p-depth stats over only the first N issues.")
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.pass_context
def analyze_cmd(ctx, p_min, p_max, sample, out_dir):
    """Topology report: dependency counts, orphans, components, p-graphs."""
    _, g = _graph(ctx)
    p_range = range(p_min or 1, p_max + 1) if p_max else None
    centers = sorted(g.issues)[:sample] if sample else None
    report = graph_stats(g, p_range=p_range, sample=centers)
    body = {
        "issues": report.issue_count,
        "dependencies": report.dependency_count,
        "dependencies_per_issue": {
            "min": report.dependencies_min,
            "avg": round(report.dependencies_avg, 4),
            "median": report.dependencies_median,
            "max": report.dependencies_max,
        },
        "orphans": report.orphan_count,
        "orphan_fraction": round(report.orphan_fraction, 4),
        "components": report.component_count,
        "largest_components": report.component_sizes[:20],
    }
    if report.p_depth_graph_count is not None:
        body["p_depth_graphs"] = report.p_depth_graph_count
        body["issues_in_p_graphs"] = {
            str(p): {"min": lo, "avg": round(avg, 2), "max": hi}
            for p, (lo, avg, hi) in report.issues_in_p_graphs.items()
        }
    _echo_json(body)
    if out_dir:
        base = Path(out_dir)
        base.mkdir(parents=True, exist_ok=True)
        (base / "topology.json").write_text(json.dumps(body, indent=2) + "\n")
        plots.save_degree_histogram(report, base / "degree_histogram.png")
        plots.save_component_sizes(report, base / "component_sizes.png")
        click.echo(f"wrote topology.json and figures under {base}", err=True)


@main.command("crossval")
@click.argument("pairs_file", type=click.Path(exists=True))
@click.option("--k", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--start-thr", default=0.5, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.pass_context
def crossval_cmd(ctx, pairs_file, k, seed, start_thr, out_dir):
    """k-fold cross-validation of both detectors on labeled pairs."""
    store = _store(ctx)
    with open(pairs_file, encoding="utf-8") as fh:
        pairs = evaluate.load_pairs(fh)
    try:
        report = evaluate.crossval(
            store.repository.issues, pairs, k=k, seed=seed, start_thr=start_thr
        )
    except ValidationError as exc:
        raise click.ClickException(str(exc))
    lines = ["detector,accuracy,recall,precision,f_measure"]
    for name, m in (("reference", report.reference), ("duplicate", report.duplicate)):
        lines.append(
            f"{name},{m.accuracy:.4f},{m.recall:.4f},{m.precision:.4f},{m.f_measure:.4f}"
        )
    for line in lines:
        click.echo(line)
    click.echo(
        f"# fold thresholds: {[round(t, 2) for t in report.fold_thresholds]}",
        err=True,
    )
    if out_dir:
        base = Path(out_dir)
        base.mkdir(parents=True, exist_ok=True)
        (base / "crossval.csv").write_text("\n".join(lines) + "\n")
        plots.save_crossval_bars(report, base / "crossval.png")
        click.echo(f"wrote crossval.csv and crossval.png under {base}", err=True)


@main.command("tune")
@click.argument("pairs_file", type=click.Path(exists=True))
@click.option("--start-thr", default=0.5, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.pass_context
def tune_cmd(ctx, pairs_file, start_thr, out_dir):
    """Tune the duplicate similarity threshold for max F-measure."""
    store = _store(ctx)
    with open(pairs_file, encoding="utf-8") as fh:
        pairs = evaluate.load_pairs(fh)
    scores = evaluate.score_pairs(store.repository.issues, pairs)
    result = evaluate.tune_threshold(scores, pairs, start_thr=start_thr)
    lines = ["threshold,f_measure"] + [
        f"{thr:.2f},{f:.4f}" for thr, f in result.curve
    ]
    for line in lines:
        click.echo(line)
    click.echo(
        f"# best threshold {result.best_threshold:.2f} "
        f"(F={result.best_f_measure:.4f})",
        err=True,
    )
    if out_dir:
        base = Path(out_dir)
        base.mkdir(parents=True, exist_ok=True)
        (base / "f_curve.csv").write_text("\n".join(lines) + "\n")
        plots.save_f_curve(result, base / "f_curve.png")
        click.echo(f"wrote f_curve.csv and f_curve.png under {base}", err=True)


@main.command("generate")
@click.option("--seed", default=7, show_default=True)
@click.option("--profile", type=click.Choice(["demo", "perf"]), default="demo",
              show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def generate_cmd(seed, profile, out_dir):
    """Write a synthetic repository with planted ground truth."""
    if profile == "perf":
        repo = build_perf_repo(seed=seed)
    else:
        repo = generate_repository(seed=seed)
    write_jsonl(repo, out_dir)
    click.echo(
        f"wrote {len(repo.issues)} issues / {len(repo.deps)} dependencies to {out_dir}"
    )


@main.command("serve")
@click.option("--port", envvar="DEPGRAPH_PORT", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--thr", envvar="DEPGRAPH_DUP_THRESHOLD",
              default=DEFAULT_DUP_THRESHOLD, show_default=True)
@click.pass_context
def serve_cmd(ctx, port, host, thr):
    """Run the HTTP query service over the data directory."""
    import uvicorn

    from .api import create_app

    engine = Engine(ctx.obj["data_dir"], dup_threshold=thr)
    data_dir = ctx.obj["data_dir"]
    if Path(data_dir).exists():
        engine.load_data_dir()
    uvicorn.run(create_app(engine), host=host, port=port)


def _write_lines(lines: list[str], out_file: str | None) -> None:
    if out_file:
        Path(out_file).parent.mkdir(parents=True, exist_ok=True)
        Path(out_file).write_text("\n".join(lines) + ("\n" if lines else ""))
    else:
        for line in lines:
            click.echo(line)


if __name__ == "__main__":
    main(obj={})
