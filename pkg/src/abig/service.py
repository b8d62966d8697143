"""HTTP workbench service over an on-disk workspace of JSON documents.

State lives in ``<workspace>/{graphs,sessions,mappings,monitors}/*.json``.
Reads are concurrent; every mutation of a resource goes through a
per-resource lock (single writer), and files are written atomically.
Graph bodies are served as canonical bytes, so unchanged resources are
byte-identical across calls.
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .coverage import ScorePolicy, coverage_report, evaluate_scores
from .errors import AbilityGraphError, CycleIntroduced, MalformedDocument
from .merge import (
    DEFAULT_THRESHOLD,
    CandidateStatus,
    DecisionLedger,
    merge_all,
    merged_graph_id,
    propose_identities,
)
from .model import stats, strip_terminals, truncate_depth
from .serialization import (
    canonical_json,
    graph_from_document,
    ledger_to_document,
    load_coverage_mapping,
    load_ledger,
    save_graph,
)
from .validation import validate


class Workspace:
    """Document store with per-resource single-writer locks."""

    def __init__(self, root: Path):
        self.root = Path(root)
        for sub in ("graphs", "sessions", "mappings", "monitors"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self._locks: dict[tuple[str, str], threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    def lock(self, kind: str, resource_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks[(kind, resource_id)]

    def path(self, kind: str, resource_id: str) -> Path:
        return self.root / kind / f"{resource_id}.json"

    def read(self, kind: str, resource_id: str) -> bytes | None:
        path = self.path(kind, resource_id)
        if not path.exists():
            return None
        return path.read_bytes()

    def write(self, kind: str, resource_id: str, data: bytes) -> None:
        path = self.path(kind, resource_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_bytes(data)
        tmp.replace(path)

    def list_ids(self, kind: str) -> list[str]:
        return sorted(p.stem for p in (self.root / kind).glob("*.json"))


def _error_response(status: int, code: str, message: str, **extra) -> JSONResponse:
    body = {"error": code, "message": message}
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def create_app(workspace: Path | str, ui_dir: Path | None = None) -> FastAPI:
    ws = Workspace(Path(workspace))
    app = FastAPI(title="abig", docs_url=None, redoc_url=None)

    @app.exception_handler(AbilityGraphError)
    def _domain_error(_request: Request, exc: AbilityGraphError):
        return _error_response(400, exc.code, exc.message)

    # -- graphs -----------------------------------------------------------

    def _load_graph(graph_id: str):
        data = ws.read("graphs", graph_id)
        if data is None:
            return None
        return graph_from_document(json.loads(data.decode("utf-8")))

    @app.get("/api/graphs")
    def list_graphs():
        rows = []
        for graph_id in ws.list_ids("graphs"):
            graph = _load_graph(graph_id)
            row = stats(graph)
            rows.append(
                {
                    "id": graph.id,
                    "mode": graph.mode.value,
                    "stage_label": graph.stage_label,
                    "node_count": row.node_count,
                    "edge_count": row.edge_count,
                }
            )
        return Response(content=canonical_json(rows), media_type="application/json")

    @app.post("/api/graphs", status_code=201)
    def create_graph(document: dict):
        try:
            graph = graph_from_document(document)
        except AbilityGraphError as exc:
            return _error_response(400, exc.code, exc.message)
        with ws.lock("graphs", graph.id):
            if ws.read("graphs", graph.id) is not None:
                return _error_response(409, "Conflict", f"graph {graph.id!r} already exists")
            ws.write("graphs", graph.id, save_graph(graph))
        return {"id": graph.id}

    @app.get("/api/graphs/{graph_id}")
    def get_graph(graph_id: str, depth: int | None = None, terminals: bool = True):
        graph = _load_graph(graph_id)
        if graph is None:
            return _error_response(404, "NotFound", f"graph {graph_id!r} not found")
        try:
            if not terminals:
                graph = strip_terminals(graph)
            if depth is not None:
                graph = truncate_depth(graph, depth)
        except AbilityGraphError as exc:
            return _error_response(400, exc.code, exc.message)
        except ValueError as exc:
            return _error_response(400, "UsageError", str(exc))
        return Response(content=save_graph(graph), media_type="application/json")

    @app.post("/api/graphs/{graph_id}/validate")
    def validate_graph(graph_id: str, mode: str = "weakened"):
        graph = _load_graph(graph_id)
        if graph is None:
            return _error_response(404, "NotFound", f"graph {graph_id!r} not found")
        if mode not in ("strict", "weakened"):
            return _error_response(400, "UsageError", f"unknown validation mode {mode!r}")
        report = validate(graph, mode)
        body = {
            "graph_id": report.graph_id,
            "mode_checked": report.mode_checked.value,
            "passed": report.passed,
            "violations": [
                {
                    "rule": v.rule.value,
                    "message": v.message,
                    "node": v.node,
                    "edge": list(v.edge) if v.edge else None,
                }
                for v in report.violations
            ],
        }
        return Response(content=canonical_json(body), media_type="application/json")

    # -- merge sessions -----------------------------------------------------

    def _read_session(session_id: str) -> dict | None:
        data = ws.read("sessions", session_id)
        return None if data is None else json.loads(data.decode("utf-8"))

    def _write_session(document: dict) -> None:
        ws.write("sessions", document["session_id"], canonical_json(document))

    def _session_ledger(document: dict) -> DecisionLedger:
        return load_ledger(
            json.dumps(
                {
                    "format_version": 1,
                    "kind": "decision-ledger",
                    "session_id": document["session_id"],
                    "base_graph": document["base_graph"],
                    "others": document["others"],
                    "candidates": document["candidates"],
                }
            )
        )

    def _session_graphs(document: dict):
        graphs = []
        for graph_id in [document["base_graph"]] + list(document["others"]):
            graph = _load_graph(graph_id)
            if graph is None:
                raise MalformedDocument(f"graph {graph_id!r} is missing from the workspace")
            graphs.append(graph)
        return graphs

    @app.post("/api/merge/sessions", status_code=201)
    def create_session(body: dict):
        base = body.get("base")
        others = body.get("others", [])
        if not base or not isinstance(others, list) or not others:
            return _error_response(400, "UsageError", "body needs 'base' and a non-empty 'others' list")
        threshold = float(body.get("threshold", DEFAULT_THRESHOLD))
        session_id = str(body.get("session_id") or f"session-{_utc_now().replace(':', '')}")
        with ws.lock("sessions", session_id):
            if _read_session(session_id) is not None:
                return _error_response(409, "Conflict", f"session {session_id!r} already exists")
            graphs = []
            for graph_id in [base] + list(others):
                graph = _load_graph(str(graph_id))
                if graph is None:
                    return _error_response(404, "NotFound", f"graph {graph_id!r} not found")
                graphs.append(graph)
            candidates = propose_identities(graphs, threshold=threshold)
            ledger = DecisionLedger(
                session_id=session_id,
                base_graph=str(base),
                others=tuple(str(g) for g in others),
                candidates=tuple(candidates),
            )
            document = ledger_to_document(ledger)
            document["kind"] = "merge-session"
            document["threshold"] = threshold
            document["created_at"] = _utc_now()
            document["status"] = "open"
            _write_session(document)
        return Response(status_code=201, content=canonical_json(document), media_type="application/json")

    @app.get("/api/merge/sessions/{session_id}")
    def get_session(session_id: str):
        document = _read_session(session_id)
        if document is None:
            return _error_response(404, "NotFound", f"session {session_id!r} not found")
        return Response(content=canonical_json(document), media_type="application/json")

    @app.get("/api/merge/sessions/{session_id}/candidates")
    def list_candidates(session_id: str, status: str | None = None):
        document = _read_session(session_id)
        if document is None:
            return _error_response(404, "NotFound", f"session {session_id!r} not found")
        candidates = document["candidates"]
        if status is not None:
            if status not in {s.value for s in CandidateStatus}:
                return _error_response(400, "UsageError", f"unknown candidate status {status!r}")
            candidates = [c for c in candidates if c["status"] == status]
        return Response(content=canonical_json(candidates), media_type="application/json")

    @app.post("/api/merge/sessions/{session_id}/decisions")
    def decide_candidate(session_id: str, body: dict):
        candidate_id = body.get("candidate_id")
        verdict = body.get("verdict")
        if not candidate_id or verdict not in ("approve", "reject"):
            return _error_response(
                400, "UsageError", "body needs 'candidate_id' and verdict approve|reject"
            )
        with ws.lock("sessions", session_id):
            document = _read_session(session_id)
            if document is None:
                return _error_response(404, "NotFound", f"session {session_id!r} not found")
            if document["status"] != "open":
                return _error_response(409, "Conflict", "session is already applied and immutable")
            target = next(
                (c for c in document["candidates"] if c["candidate_id"] == candidate_id), None
            )
            if target is None:
                return _error_response(404, "NotFound", f"candidate {candidate_id!r} not found")
            if target["status"] != "pending":
                return _error_response(
                    409,
                    "Conflict",
                    f"candidate {candidate_id!r} is already {target['status']}",
                    candidate=target,
                )
            if verdict == "reject":
                target["status"] = "rejected"
                _write_session(document)
                return Response(content=canonical_json(target), media_type="application/json")

            labels = [m["label"] for m in target["members"]]
            longest = max(len(text) for text in labels)
            label = body.get("canonical_label") or sorted(
                text for text in labels if len(text) == longest
            )[0]
            target["status"] = "approved"
            target["canonical_label"] = label
            # speculative merge: an approval that would close a cycle is refused
            try:
                ledger = _session_ledger(document)
                merge_all(_session_graphs(document), ledger)
            except CycleIntroduced as exc:
                target["status"] = "pending"
                target["canonical_label"] = None
                return _error_response(
                    409,
                    "CycleIntroduced",
                    exc.message,
                    cycle=exc.cycle,
                    candidate_id=candidate_id,
                )
            _write_session(document)
            return Response(content=canonical_json(target), media_type="application/json")

    @app.post("/api/merge/sessions/{session_id}/apply")
    def apply_session(session_id: str):
        with ws.lock("sessions", session_id):
            document = _read_session(session_id)
            if document is None:
                return _error_response(404, "NotFound", f"session {session_id!r} not found")
            if document["status"] != "open":
                return _error_response(409, "Conflict", "session is already applied")
            pending = [c for c in document["candidates"] if c["status"] == "pending"]
            if pending:
                return _error_response(
                    409,
                    "Conflict",
                    f"{len(pending)} candidates are still pending review",
                )
            ledger = _session_ledger(document)
            try:
                merged, steps = merge_all(_session_graphs(document), ledger)
            except AbilityGraphError as exc:
                return _error_response(409, exc.code, exc.message)
            with ws.lock("graphs", merged.id):
                ws.write("graphs", merged.id, save_graph(merged))
            document["status"] = "applied"
            document["merged_graph_id"] = merged.id
            _write_session(document)
            body = {
                "merged_graph_id": merged.id,
                "stage_stats": [
                    {
                        "stage_label": s.stage_label,
                        "node_count": s.node_count,
                        "edge_count": s.edge_count,
                    }
                    for s in steps
                ],
            }
            return Response(content=canonical_json(body), media_type="application/json")

    # -- coverage and monitoring ---------------------------------------------

    def _load_mapping(mapping_id: str):
        data = ws.read("mappings", mapping_id)
        if data is None:
            return None
        return load_coverage_mapping(data)

    @app.get("/api/mappings")
    def list_mappings():
        return Response(content=canonical_json(ws.list_ids("mappings")), media_type="application/json")

    @app.get("/api/mappings/{mapping_id}")
    def get_mapping(mapping_id: str):
        data = ws.read("mappings", mapping_id)
        if data is None:
            return _error_response(404, "NotFound", f"mapping {mapping_id!r} not found")
        return Response(content=data, media_type="application/json")

    @app.get("/api/coverage/{graph_id}")
    def get_coverage(graph_id: str, mapping: str):
        graph = _load_graph(graph_id)
        if graph is None:
            return _error_response(404, "NotFound", f"graph {graph_id!r} not found")
        cov_mapping = _load_mapping(mapping)
        if cov_mapping is None:
            return _error_response(404, "NotFound", f"mapping {mapping!r} not found")
        report = coverage_report(graph, cov_mapping)
        body = {
            "graph_id": report.graph_id,
            "mapping_id": report.mapping_id,
            "complete": report.complete,
            "covered": sorted(report.covered),
            "uncovered": sorted(report.uncovered),
            "unmapped_modules": sorted(report.unmapped_modules),
        }
        return Response(content=canonical_json(body), media_type="application/json")

    def _monitor_response(graph, document: dict):
        mapping = _load_mapping(document["mapping_id"])
        policy = ScorePolicy(document["policy"])
        scores = {
            name: (1.0 if value == "up" else 0.0) if isinstance(value, str) else float(value)
            for name, value in document["modules"].items()
        }
        state = evaluate_scores(graph, mapping, scores, policy)
        body = {
            "graph_id": document["graph_id"],
            "mapping_id": document["mapping_id"],
            "policy": policy.value,
            "modules": document["modules"],
            "abilities": {
                ability: {"score": score, "available": score == 1.0}
                for ability, score in sorted(state.ability_state.items())
            },
        }
        return Response(content=canonical_json(body), media_type="application/json")

    @app.get("/api/monitor/{graph_id}")
    def get_monitor(graph_id: str, mapping: str | None = None, policy: str = "min"):
        graph = _load_graph(graph_id)
        if graph is None:
            return _error_response(404, "NotFound", f"graph {graph_id!r} not found")
        data = ws.read("monitors", graph_id)
        if data is None:
            if mapping is None:
                return _error_response(
                    404,
                    "NotFound",
                    f"no monitor configured for {graph_id!r}; pass ?mapping= to initialize",
                )
            cov_mapping = _load_mapping(mapping)
            if cov_mapping is None:
                return _error_response(404, "NotFound", f"mapping {mapping!r} not found")
            if policy not in {p.value for p in ScorePolicy}:
                return _error_response(400, "UsageError", f"unknown policy {policy!r}")
            report = coverage_report(graph, cov_mapping)
            if not report.complete:
                return _error_response(
                    409,
                    "IncompleteCoverage",
                    "monitoring requires complete coverage",
                    uncovered=sorted(report.uncovered),
                )
            with ws.lock("monitors", graph_id):
                document = {
                    "format_version": 1,
                    "kind": "monitor-state",
                    "graph_id": graph_id,
                    "mapping_id": mapping,
                    "policy": policy,
                    "modules": {name: "up" for name in cov_mapping.modules()},
                }
                ws.write("monitors", graph_id, canonical_json(document))
        else:
            document = json.loads(data.decode("utf-8"))
        return _monitor_response(graph, document)

    @app.put("/api/monitor/{graph_id}/modules/{module_name}")
    def put_module_state(graph_id: str, module_name: str, body: dict):
        graph = _load_graph(graph_id)
        if graph is None:
            return _error_response(404, "NotFound", f"graph {graph_id!r} not found")
        with ws.lock("monitors", graph_id):
            data = ws.read("monitors", graph_id)
            if data is None:
                return _error_response(
                    404, "NotFound", f"no monitor configured for {graph_id!r}"
                )
            document = json.loads(data.decode("utf-8"))
            if module_name not in document["modules"]:
                return _error_response(404, "NotFound", f"unknown module {module_name!r}")
            if "status" in body:
                if body["status"] not in ("up", "down"):
                    return _error_response(400, "UsageError", "status must be up or down")
                document["modules"][module_name] = body["status"]
            elif "score" in body:
                score = body["score"]
                if not isinstance(score, (int, float)) or not 0.0 <= float(score) <= 1.0:
                    return _error_response(400, "UsageError", "score must be within [0, 1]")
                document["modules"][module_name] = float(score)
            else:
                return _error_response(400, "UsageError", "body needs 'status' or 'score'")
            ws.write("monitors", graph_id, canonical_json(document))
        return _monitor_response(graph, document)

    if ui_dir is not None and Path(ui_dir).exists():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
