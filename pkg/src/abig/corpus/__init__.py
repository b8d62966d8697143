"""Bundled sample corpus: six driving-task source descriptions plus the
curated step-2 inputs, identity ledger, cluster spec, module mappings and
monitor events that drive them through the whole pipeline.

The sources encode the task descriptions at sample scale (one graph per
source family); the holistic sample graph extends the reduced result with
the perception and operation detail the application fixtures exercise.
"""

from __future__ import annotations

import json
from dataclasses import replace
from importlib import resources
from pathlib import Path

from ..coverage import CoverageMapping, MonitorEvent
from ..merge import DecisionLedger, merge_all
from ..model import AbilityGraph, GraphStats
from ..reduce import ClusterSpec, cluster_nodes, dedupe_edges
from ..serialization import (
    load_annotations,
    load_cluster_spec,
    load_coverage_mapping,
    load_ledger,
    load_monitor_events,
    load_rename_map,
    load_terminal_plan,
    save_graph,
)
from ..transform import import_edge_list, import_hierarchy, import_node_link, run_step2
from .holistic import holistic_sample

__all__ = [
    "GRAPH_ORDER",
    "SOURCE_FILES",
    "all_raw",
    "all_weakened",
    "av_stack_mapping",
    "cluster_spec",
    "curated_ledger",
    "data_path",
    "drivers_exam_mapping",
    "holistic_sample",
    "merge_corpus",
    "raw_graph",
    "reduce_corpus",
    "seed_workspace",
    "teleop_events",
    "teleop_mapping",
    "weakened_graph",
]

GRAPH_ORDER = ("sae-ddt", "bubb", "donges", "fastenmeier", "pendleton", "wickens")

SOURCE_FILES = {
    "sae-ddt": ("edgelist", "sae-ddt.edgelist.txt"),
    "bubb": ("edgelist", "bubb.edgelist.txt"),
    "donges": ("nodelink", "donges.nodelink.json"),
    "fastenmeier": ("outline", "fastenmeier.outline.txt"),
    "pendleton": ("edgelist", "pendleton.edgelist.txt"),
    "wickens": ("nodelink", "wickens.nodelink.json"),
}


def data_path(name: str) -> Path:
    return Path(str(resources.files(__package__) / "data" / name))


def _read(name: str) -> bytes:
    return (resources.files(__package__) / "data" / name).read_bytes()


def raw_graph(graph_id: str) -> AbilityGraph:
    fmt, filename = SOURCE_FILES[graph_id]
    data = _read(filename)
    if fmt == "edgelist":
        return import_edge_list(data.decode("utf-8"), graph_id)
    if fmt == "outline":
        return import_hierarchy(data.decode("utf-8"), graph_id)
    return import_node_link(json.loads(data), graph_id)


def all_raw() -> list[AbilityGraph]:
    return [raw_graph(g) for g in GRAPH_ORDER]


def weakened_graph(graph_id: str) -> AbilityGraph:
    return run_step2(
        raw_graph(graph_id),
        rename_map=load_rename_map(_read(f"{graph_id}.rename.json")),
        annotations=load_annotations(_read(f"{graph_id}.annotations.json")),
        plan=load_terminal_plan(_read(f"{graph_id}.terminals.json")),
    )


def all_weakened() -> list[AbilityGraph]:
    return [weakened_graph(g) for g in GRAPH_ORDER]


def curated_ledger() -> DecisionLedger:
    return load_ledger(_read("ledger.json"))


def merge_corpus() -> tuple[AbilityGraph, list[GraphStats]]:
    return merge_all(all_weakened(), curated_ledger())


def cluster_spec() -> ClusterSpec:
    return load_cluster_spec(_read("clusters.json"))


def reduce_corpus() -> AbilityGraph:
    merged, _ = merge_corpus()
    reduced = dedupe_edges(cluster_nodes(merged, cluster_spec()))
    return replace(reduced, stage_label="reduced")


def av_stack_mapping() -> CoverageMapping:
    return load_coverage_mapping(_read("av-stack.mapping.json"))


def drivers_exam_mapping() -> CoverageMapping:
    return load_coverage_mapping(_read("drivers-exam.mapping.json"))


def teleop_mapping() -> CoverageMapping:
    return load_coverage_mapping(_read("teleop.mapping.json"))


def teleop_events() -> list[MonitorEvent]:
    return load_monitor_events(_read("teleop.events.json"))


def seed_workspace(workspace: str | Path) -> list[str]:
    """Populate a service workspace with the corpus graphs and mappings.

    Returns the ids of the graphs written.
    """
    root = Path(workspace)
    graphs_dir = root / "graphs"
    mappings_dir = root / "mappings"
    graphs_dir.mkdir(parents=True, exist_ok=True)
    mappings_dir.mkdir(parents=True, exist_ok=True)

    written = []
    for graph in all_weakened():
        (graphs_dir / f"{graph.id}.json").write_bytes(save_graph(graph))
        written.append(graph.id)
    merged, _ = merge_corpus()
    (graphs_dir / f"{merged.id}.json").write_bytes(save_graph(merged))
    written.append(merged.id)
    reduced = replace(reduce_corpus(), id="corpus-reduced")
    (graphs_dir / f"{reduced.id}.json").write_bytes(save_graph(reduced))
    written.append(reduced.id)
    sample = holistic_sample()
    (graphs_dir / f"{sample.id}.json").write_bytes(save_graph(sample))
    written.append(sample.id)

    for name in ("av-stack.mapping.json", "drivers-exam.mapping.json", "teleop.mapping.json"):
        mapping = load_coverage_mapping(_read(name))
        (mappings_dir / f"{mapping.mapping_id}.json").write_bytes(_read(name))
    return written
