"""HTTP query surface over one engine instance.

JSON-over-HTTP with explicit DTOs. Read endpoints are side-effect free and
serve from the engine's current snapshot; writes (import, update, decisions)
serialize through the engine's single writer.

Environment:
    DEPGRAPH_DATA_DIR       repository directory (issues/dependencies/decisions)
    DEPGRAPH_PORT           serve port (default 8000)
    DEPGRAPH_MAX_DEPTH      graph query depth cap (default 5)
    DEPGRAPH_DUP_THRESHOLD  duplicate detector threshold (default 0.5)
"""
from __future__ import annotations

import os
import time
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .consistency import check_and_diagnose
from .dupdetect import DuplicateProposal
from .engine import DEFAULT_DUP_THRESHOLD, Engine
from .graph import graph_stats, hop_distances
from .model import (
    DecisionRecord,
    DecisionVerdict,
    DependencyStatus,
    DependencyType,
    UnknownIssueError,
    ValidationError,
)
from .proposals import ContextParams, PropertyRule

DEFAULT_MAX_DEPTH = 5


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _parse_bool(raw: str | None, default: bool = False) -> bool:
    if raw is None:
        return default
    return raw.lower() in ("1", "true", "yes", "on")


def create_app(engine: Engine | None = None, max_depth: int | None = None) -> FastAPI:
    if engine is None:
        data_dir = os.environ.get("DEPGRAPH_DATA_DIR")
        threshold = float(
            os.environ.get("DEPGRAPH_DUP_THRESHOLD", DEFAULT_DUP_THRESHOLD)
        )
        engine = Engine(data_dir=data_dir, dup_threshold=threshold)
        if data_dir and Path(data_dir).exists():
            engine.load_data_dir()
    if max_depth is None:
        max_depth = int(os.environ.get("DEPGRAPH_MAX_DEPTH", DEFAULT_MAX_DEPTH))
    app = FastAPI(title="issuedeps", version="0.1.0")
    app.state.engine = engine
    app.state.max_depth = max_depth

    # -- graph -----------------------------------------------------------

    @app.get("/api/graph/{key}")
    def get_graph(key: str, request: Request):
        params = request.query_params
        raw_depth = params.get("depth", str(app.state.max_depth))
        try:
            depth = int(raw_depth)
        except ValueError:
            return _error(400, f"bad depth: {raw_depth!r}")
        if depth < 0:
            return _error(400, f"bad depth: {depth}")
        include_proposed = _parse_bool(params.get("include_proposed"))
        clamped = depth > app.state.max_depth
        effective = min(depth, app.state.max_depth)
        g = engine.graph
        if key not in g.issues:
            return _error(404, f"unknown issue: {key}")
        levels = hop_distances(g, key, effective, include_proposed)
        members = set(levels)
        nodes = [
            _node_dto(g.issues[k], levels[k]) for k in sorted(members)
        ]
        edges = []
        seen_pairs = set()
        for k in members:
            for entry in g.adjacency.get(k, ()):
                if not entry.outgoing or entry.neighbor not in members:
                    continue
                if entry.status == DependencyStatus.REJECTED:
                    continue
                if entry.status == DependencyStatus.PROPOSED and not include_proposed:
                    continue
                edges.append(
                    {
                        "from": k,
                        "to": entry.neighbor,
                        "dep_type": entry.dep_type.value,
                        "status": entry.status.value,
                        "score": entry.score,
                        "proposed": entry.status == DependencyStatus.PROPOSED,
                    }
                )
                seen_pairs.add((k, entry.neighbor) if k <= entry.neighbor else (entry.neighbor, k))
        if include_proposed:
            for prop in engine.detector_edges(members):
                if isinstance(prop, DuplicateProposal):
                    pair, dep_type, score = prop.pair, "duplicates", prop.score
                else:
                    a, b = prop.from_key, prop.to_key
                    pair = (a, b) if a <= b else (b, a)
                    dep_type, score = "untyped", 1.0
                if pair in seen_pairs:
                    continue
                seen_pairs.add(pair)
                edges.append(
                    {
                        "from": pair[0],
                        "to": pair[1],
                        "dep_type": dep_type,
                        "status": "proposed",
                        "score": score,
                        "proposed": True,
                    }
                )
        edges.sort(key=lambda e: (e["from"], e["to"], e["dep_type"]))
        body = {
            "center": key,
            "depth": effective,
            "requested_depth": depth,
            "clamped": clamped,
            "nodes": nodes,
            "edges": edges,
        }
        if clamped:
            body["note"] = f"depth clamped to {app.state.max_depth}"
        return body

    # -- proposals ---------------------------------------------------------

    @app.get("/api/proposals/{key}")
    def get_proposals(key: str, request: Request):
        params = request.query_params
        try:
            min_depth = int(params.get("min_depth", "5"))
            f_depth = float(params.get("f_depth", "1"))
            f_orphan = float(params.get("f_orphan", "1"))
        except ValueError as exc:
            return _error(400, f"bad factor: {exc}")
        rules = []
        for raw in params.getlist("prop"):
            pieces = raw.split(":")
            if len(pieces) != 3:
                return _error(400, f"malformed prop triple: {raw!r}")
            name, value, factor_text = pieces
            try:
                factor = float(factor_text)
            except ValueError:
                return _error(400, f"malformed prop factor: {raw!r}")
            if factor <= 0:
                return _error(400, f"prop factor must be positive: {raw!r}")
            rules.append(PropertyRule(name=name, value=value, factor=factor))
        try:
            context = ContextParams(
                min_depth=min_depth,
                f_depth=f_depth,
                f_orphan=f_orphan,
                properties=rules,
            )
        except ValidationError as exc:
            return _error(400, str(exc))
        try:
            ranked = engine.ranked_proposals(key, context)
        except UnknownIssueError:
            return _error(404, f"unknown issue: {key}")
        return {
            "center": key,
            "proposals": [
                {
                    "from": p.from_key,
                    "to": p.to_key,
                    "base_score": p.base_score,
                    "ranked_score": p.ranked_score,
                    "origins": sorted(p.origins),
                    "applied_factors": [
                        {"label": label, "factor": factor}
                        for label, factor in p.applied_factors
                    ],
                }
                for p in ranked
            ],
        }

    # -- decisions -----------------------------------------------------------

    @app.post("/api/decisions")
    async def post_decision(request: Request):
        body = await request.json()
        verdict_raw = body.get("verdict")
        if verdict_raw not in ("accept", "reject"):
            return _error(400, f"bad verdict: {verdict_raw!r}")
        dep_type_raw = body.get("dep_type")
        if verdict_raw == "accept":
            if not dep_type_raw or dep_type_raw == "untyped":
                return _error(400, "accept requires a concrete dep_type")
        dep_type = None
        if dep_type_raw:
            try:
                dep_type = DependencyType(dep_type_raw)
            except ValueError:
                return _error(400, f"unknown dep_type: {dep_type_raw!r}")
        try:
            record = DecisionRecord(
                from_key=body.get("from", ""),
                to_key=body.get("to", ""),
                verdict=DecisionVerdict(verdict_raw),
                dep_type=dep_type,
                actor=body.get("actor", "api"),
                at=body.get("at", _now()),
            )
            engine.record_decision(record)
        except UnknownIssueError as exc:
            return _error(404, f"unknown issue: {exc.args[0]}")
        except ValidationError as exc:
            return _error(400, str(exc))
        state = {
            "from": record.from_key,
            "to": record.to_key,
            "verdict": record.verdict.value,
            "dep_type": record.dep_type.value if record.dep_type else None,
            "status": (
                "accepted" if record.verdict == DecisionVerdict.ACCEPT else "rejected"
            ),
            "score": 1.0 if record.verdict == DecisionVerdict.ACCEPT else None,
        }
        return JSONResponse(status_code=201, content=state)

    # -- consistency ---------------------------------------------------------

    @app.get("/api/consistency/{key}")
    def get_consistency(key: str, request: Request):
        params = request.query_params
        try:
            depth = int(params.get("depth", "5"))
        except ValueError:
            return _error(400, f"bad depth: {params.get('depth')!r}")
        if depth < 0:
            return _error(400, f"bad depth: {depth}")
        run_diagnosis = _parse_bool(params.get("diagnose"))
        try:
            time_limit_ms = float(params.get("time_limit_ms", "5000"))
        except ValueError:
            return _error(400, "bad time_limit_ms")
        g = engine.graph
        if key not in g.issues:
            return _error(404, f"unknown issue: {key}")
        result = check_and_diagnose(
            g, key, depth, run_diagnosis=run_diagnosis,
            time_limit=time_limit_ms / 1000.0,
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
            "elapsed_ms": result.elapsed * 1000.0,
        }
        if run_diagnosis:
            body["diag_dependencies"] = [
                {
                    "from": d.from_key,
                    "to": d.to_key,
                    "dep_type": d.dep_type.value,
                }
                for d in result.diag_dependencies
            ]
            body["diag_issues"] = result.diag_issues
            body["dep_diag_timed_out"] = result.dep_diag_timed_out
            body["issue_diag_timed_out"] = result.issue_diag_timed_out
        return body

    # -- import / update / stats ----------------------------------------------

    @app.post("/api/import")
    async def post_import(request: Request):
        issues_text, deps_text = await _extract_streams(request)
        report = engine.import_snapshot(
            issues_text.splitlines(), deps_text.splitlines()
        )
        return {
            "issues": report.issues,
            "dependencies": report.dependencies,
            "dropped": report.dropped,
            "errors": [
                {"line": e.line, "message": e.message} for e in report.errors
            ],
        }

    @app.post("/api/update")
    async def post_update(request: Request):
        issues_text, deps_text = await _extract_streams(request)
        report = engine.apply_update(
            issues_text.splitlines(), deps_text.splitlines()
        )
        return {
            "changed_issues": report.changed_issue_keys,
            "changed_dependencies": [
                {"from": a, "to": b, "dep_type": t}
                for a, b, t in report.changed_dependencies
            ],
            "revisit_rejected": [
                {"a": a, "b": b} for a, b in report.revisit_rejected
            ],
            "errors": [
                {"line": e.line, "message": e.message} for e in report.errors
            ],
        }

    @app.get("/api/stats")
    def get_stats(request: Request):
        params = request.query_params
        p_range = None
        if "p_max" in params:
            try:
                p_min = int(params.get("p_min", "1"))
                p_max = int(params["p_max"])
            except ValueError:
                return _error(400, "bad p_min/p_max")
            p_range = range(p_min, p_max + 1)
        report = graph_stats(engine.graph, p_range=p_range)
        body = {
            "issues": report.issue_count,
            "dependencies": report.dependency_count,
            "dependencies_per_issue": {
                "min": report.dependencies_min,
                "avg": report.dependencies_avg,
                "median": report.dependencies_median,
                "max": report.dependencies_max,
            },
            "orphans": report.orphan_count,
            "orphan_fraction": report.orphan_fraction,
            "components": report.component_count,
            "largest_components": report.component_sizes[:20],
        }
        if report.p_depth_graph_count is not None:
            body["p_depth_graphs"] = report.p_depth_graph_count
            body["issues_in_p_graphs"] = {
                str(p): {"min": lo, "avg": avg, "max": hi}
                for p, (lo, avg, hi) in report.issues_in_p_graphs.items()
            }
        return body

    ui_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_dir.exists():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


async def _extract_streams(request: Request) -> tuple[str, str]:
    """Accept multipart file fields `issues` / `dependencies`, or a JSON body
    with the same keys holding JSONL text."""
    content_type = request.headers.get("content-type", "")
    if content_type.startswith("multipart/form-data"):
        form = await request.form()
        issues_part = form.get("issues")
        deps_part = form.get("dependencies")
        issues_text = await _part_text(issues_part)
        deps_text = await _part_text(deps_part)
        return issues_text, deps_text
    if content_type.startswith("application/json"):
        body = await request.json()
        return body.get("issues", ""), body.get("dependencies", "")
    raw = (await request.body()).decode("utf-8")
    return raw, ""


async def _part_text(part) -> str:
    if part is None:
        return ""
    if isinstance(part, str):
        return part
    data = await part.read()
    return data.decode("utf-8")


def _node_dto(issue, dist: int) -> dict:
    return {
        "key": issue.key,
        "title": issue.title,
        "type": issue.issue_type.value,
        "status": issue.status,
        "priority": issue.priority,
        "release": str(issue.release) if issue.release else None,
        "distance": dist,
    }


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
