"""Canonical on-disk formats: the graph document plus every curated input.

All documents are versioned JSON (``format_version`` 1) serialized with the
same canonicalization rules: sorted object keys, two-space indent, UTF-8,
trailing newline, nodes sorted by id and edges by (from, to, kind). Equal
graphs therefore serialize to identical bytes.
"""

from __future__ import annotations

import json
from typing import Any

from .coverage import CoverageMapping, ModuleBinding, ModuleStatus, MonitorEvent
from .errors import MalformedDocument, ScoreOutOfRange, UnsupportedVersion
from .merge import CandidateMember, CandidateStatus, DecisionLedger, IdentityCandidate
from .model import (
    AbilityGraph,
    Edge,
    EdgeKind,
    GraphMode,
    GraphStats,
    Node,
    NodeKind,
    SolutionNeutral,
)
from .reduce import Cluster, ClusterSpec
from .transform import (
    EdgeAnnotation,
    EdgeClass,
    RenameEntry,
    RenameMap,
    TerminalAttachment,
    TerminalPlan,
)

FORMAT_VERSION = 1


def canonical_json(document: Any) -> bytes:
    text = json.dumps(document, ensure_ascii=False, indent=2, sort_keys=True)
    return (text + "\n").encode("utf-8")


def _parse(data: bytes | str, expected_kind: str | None = None) -> dict:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        document = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise MalformedDocument("document root must be a JSON object")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"unsupported format_version {version!r}, expected {FORMAT_VERSION}")
    if expected_kind is not None:
        kind = document.get("kind")
        if kind is not None and kind != expected_kind:
            raise MalformedDocument(f"expected a {expected_kind!r} document, got {kind!r}", locus="kind")
    return document


def _enum(value: Any, enum_cls, locus: str):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise MalformedDocument(f"expected one of {allowed}, got {value!r}", locus=locus) from None


# ---------------------------------------------------------------------------
# graph documents


def graph_to_document(graph: AbilityGraph) -> dict:
    g = graph.sorted_copy()
    return {
        "format_version": FORMAT_VERSION,
        "kind": "ability-graph",
        "id": g.id,
        "mode": g.mode.value,
        "stage_label": g.stage_label,
        "view": g.is_view,
        "nodes": [
            {
                "id": n.id,
                "label": n.label,
                "kind": n.kind.value,
                "solution_neutral": n.solution_neutral.value,
                "ability_formulated": n.ability_formulated,
                "provenance": [[src, label] for src, label in n.provenance],
                "cluster_tag": n.cluster_tag,
            }
            for n in g.nodes
        ],
        "edges": [
            {
                "from": e.src,
                "to": e.dst,
                "kind": e.kind.value,
                "multiplicity": e.multiplicity,
                "provenance": list(e.provenance),
            }
            for e in g.edges
        ],
    }


def save_graph(graph: AbilityGraph) -> bytes:
    return canonical_json(graph_to_document(graph))


def graph_from_document(document: dict) -> AbilityGraph:
    for field in ("id", "nodes", "edges"):
        if field not in document:
            raise MalformedDocument(f"missing field {field!r}")
    mode = _enum(document.get("mode", GraphMode.RAW.value), GraphMode, "mode")

    nodes: list[Node] = []
    ids: set[str] = set()
    for i, item in enumerate(document["nodes"]):
        locus = f"nodes[{i}]"
        if not isinstance(item, dict) or "id" not in item or "label" not in item:
            raise MalformedDocument("node entries need 'id' and 'label'", locus=locus)
        node_id = str(item["id"])
        if node_id in ids:
            raise MalformedDocument(f"duplicate node id {node_id!r}", locus=locus)
        ids.add(node_id)
        provenance = tuple(
            (str(p[0]), str(p[1]))
            for p in item.get("provenance", [])
        )
        nodes.append(
            Node(
                id=node_id,
                label=str(item["label"]),
                kind=_enum(item.get("kind", NodeKind.ABILITY.value), NodeKind, f"{locus}.kind"),
                solution_neutral=_enum(
                    item.get("solution_neutral", SolutionNeutral.UNREVIEWED.value),
                    SolutionNeutral,
                    f"{locus}.solution_neutral",
                ),
                ability_formulated=bool(item.get("ability_formulated", False)),
                provenance=provenance,
                cluster_tag=item.get("cluster_tag"),
            )
        )

    edges: list[Edge] = []
    for i, item in enumerate(document["edges"]):
        locus = f"edges[{i}]"
        if not isinstance(item, dict) or "from" not in item or "to" not in item:
            raise MalformedDocument("edge entries need 'from' and 'to'", locus=locus)
        src, dst = str(item["from"]), str(item["to"])
        for endpoint, side in ((src, "from"), (dst, "to")):
            if endpoint not in ids:
                raise MalformedDocument(
                    f"edge references unknown node {endpoint!r}", locus=f"{locus}.{side}"
                )
        multiplicity = item.get("multiplicity", 1)
        if not isinstance(multiplicity, int) or multiplicity < 1:
            raise MalformedDocument(
                f"multiplicity must be a positive integer, got {multiplicity!r}",
                locus=f"{locus}.multiplicity",
            )
        edges.append(
            Edge(
                src=src,
                dst=dst,
                kind=_enum(item.get("kind", EdgeKind.QUALITY.value), EdgeKind, f"{locus}.kind"),
                multiplicity=multiplicity,
                provenance=tuple(str(p) for p in item.get("provenance", [])),
            )
        )

    return AbilityGraph(
        id=str(document["id"]),
        mode=mode,
        nodes=tuple(nodes),
        edges=tuple(edges),
        stage_label=document.get("stage_label"),
        is_view=bool(document.get("view", False)),
    )


def load_graph(data: bytes | str) -> AbilityGraph:
    return graph_from_document(_parse(data, "ability-graph"))


# ---------------------------------------------------------------------------
# curated inputs


def load_rename_map(data: bytes | str) -> RenameMap:
    document = _parse(data, "rename-map")
    entries = []
    for i, item in enumerate(document.get("entries", [])):
        locus = f"entries[{i}]"
        if "node" not in item or "label" not in item:
            raise MalformedDocument("rename entries need 'node' and 'label'", locus=locus)
        entries.append(
            RenameEntry(
                node_id=str(item["node"]),
                new_label=str(item["label"]),
                ability_formulated=bool(item.get("ability_formulated", True)),
                solution_neutral=_enum(
                    item.get("solution_neutral", SolutionNeutral.YES.value),
                    SolutionNeutral,
                    f"{locus}.solution_neutral",
                ),
            )
        )
    return RenameMap(entries=tuple(entries))


def load_annotations(data: bytes | str) -> list[EdgeAnnotation]:
    document = _parse(data, "edge-annotations")
    annotations = []
    for i, item in enumerate(document.get("entries", [])):
        locus = f"entries[{i}]"
        if "from" not in item or "to" not in item or "classification" not in item:
            raise MalformedDocument(
                "annotation entries need 'from', 'to' and 'classification'", locus=locus
            )
        annotations.append(
            EdgeAnnotation(
                src=str(item["from"]),
                dst=str(item["to"]),
                classification=_enum(item["classification"], EdgeClass, f"{locus}.classification"),
            )
        )
    return annotations


def load_terminal_plan(data: bytes | str) -> TerminalPlan:
    document = _parse(data, "terminal-plan")
    attachments = []
    for i, item in enumerate(document.get("attachments", [])):
        locus = f"attachments[{i}]"
        if "leaf" not in item or "label" not in item or "terminal" not in item:
            raise MalformedDocument(
                "attachments need 'leaf', 'label' and 'terminal'", locus=locus
            )
        attachments.append(
            TerminalAttachment(
                leaf=str(item["leaf"]),
                label=str(item["label"]),
                kind=_enum(item["terminal"], NodeKind, f"{locus}.terminal"),
            )
        )
    return TerminalPlan(attachments=tuple(attachments))


def ledger_to_document(ledger: DecisionLedger) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "decision-ledger",
        "session_id": ledger.session_id,
        "base_graph": ledger.base_graph,
        "others": list(ledger.others),
        "candidates": [
            {
                "candidate_id": c.candidate_id,
                "similarity": c.similarity,
                "status": c.status.value,
                "canonical_label": c.canonical_label,
                "members": [
                    {"graph": m.graph_id, "node": m.node_id, "label": m.label} for m in c.members
                ],
            }
            for c in ledger.candidates
        ],
    }


def save_ledger(ledger: DecisionLedger) -> bytes:
    return canonical_json(ledger_to_document(ledger))


def load_ledger(data: bytes | str) -> DecisionLedger:
    document = _parse(data, "decision-ledger")
    for field in ("session_id", "base_graph"):
        if field not in document:
            raise MalformedDocument(f"missing field {field!r}")
    candidates = []
    for i, item in enumerate(document.get("candidates", [])):
        locus = f"candidates[{i}]"
        members = []
        for j, m in enumerate(item.get("members", [])):
            if "graph" not in m or "node" not in m:
                raise MalformedDocument(
                    "members need 'graph' and 'node'", locus=f"{locus}.members[{j}]"
                )
            members.append(
                CandidateMember(
                    graph_id=str(m["graph"]), node_id=str(m["node"]), label=str(m.get("label", ""))
                )
            )
        if len(members) < 2:
            raise MalformedDocument("candidates need at least two members", locus=locus)
        status = _enum(item.get("status", CandidateStatus.PENDING.value), CandidateStatus, f"{locus}.status")
        canonical_label = item.get("canonical_label")
        if status is CandidateStatus.APPROVED and not canonical_label:
            raise MalformedDocument(
                "approved candidates need a canonical_label", locus=locus
            )
        candidates.append(
            IdentityCandidate(
                candidate_id=str(item.get("candidate_id", f"c{i + 1:03d}")),
                members=tuple(members),
                similarity=float(item.get("similarity", 0.0)),
                status=status,
                canonical_label=canonical_label,
            )
        )
    return DecisionLedger(
        session_id=str(document["session_id"]),
        base_graph=str(document["base_graph"]),
        others=tuple(str(g) for g in document.get("others", [])),
        candidates=tuple(candidates),
    )


def load_cluster_spec(data: bytes | str) -> ClusterSpec:
    document = _parse(data, "cluster-spec")
    clusters = []
    for i, item in enumerate(document.get("clusters", [])):
        locus = f"clusters[{i}]"
        if "label" not in item or "members" not in item:
            raise MalformedDocument("clusters need 'label' and 'members'", locus=locus)
        clusters.append(
            Cluster(label=str(item["label"]), members=tuple(str(m) for m in item["members"]))
        )
    return ClusterSpec(clusters=tuple(clusters))


def load_coverage_mapping(data: bytes | str) -> CoverageMapping:
    document = _parse(data, "coverage-mapping")
    if "mapping_id" not in document:
        raise MalformedDocument("missing field 'mapping_id'")
    entries = []
    for i, item in enumerate(document.get("modules", [])):
        locus = f"modules[{i}]"
        if "name" not in item:
            raise MalformedDocument("module entries need a 'name'", locus=locus)
        entries.append(
            ModuleBinding(
                module=str(item["name"]),
                abilities=tuple(str(a) for a in item.get("abilities", [])),
            )
        )
    return CoverageMapping(mapping_id=str(document["mapping_id"]), entries=tuple(entries))


def load_monitor_events(data: bytes | str) -> list[MonitorEvent]:
    document = _parse(data, "monitor-events")
    events = []
    for i, item in enumerate(document.get("events", [])):
        locus = f"events[{i}]"
        if "at" not in item or "module" not in item:
            raise MalformedDocument("events need 'at' and 'module'", locus=locus)
        status = item.get("status")
        score = item.get("score")
        if status is None and score is None:
            raise MalformedDocument("events need 'status' or 'score'", locus=locus)
        if score is not None and (not isinstance(score, (int, float)) or not 0 <= score <= 1):
            raise ScoreOutOfRange(f"{locus}: score must be within [0, 1], got {score!r}")
        events.append(
            MonitorEvent(
                at=str(item["at"]),
                module=str(item["module"]),
                status=_enum(status, ModuleStatus, f"{locus}.status") if status is not None else None,
                score=float(score) if score is not None else None,
            )
        )
    return events


# ---------------------------------------------------------------------------
# reports and stats


def stats_to_csv(rows: list[GraphStats]) -> str:
    lines = ["stage_label,node_count,edge_count"]
    for row in rows:
        lines.append(f"{row.stage_label},{row.node_count},{row.edge_count}")
    return "\n".join(lines) + "\n"
