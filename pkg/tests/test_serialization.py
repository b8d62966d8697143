import json

import pytest

from abig.dot import export_dot
from abig.errors import GraphCyclic, MalformedDocument, UnsupportedVersion
from abig.merge import CandidateStatus
from abig.model import Edge, EdgeKind, GraphMode, truncate_depth
from abig.serialization import (
    graph_to_document,
    load_annotations,
    load_cluster_spec,
    load_coverage_mapping,
    load_graph,
    load_ledger,
    load_monitor_events,
    load_rename_map,
    load_terminal_plan,
    save_graph,
    save_ledger,
    stats_to_csv,
)
from abig.model import GraphStats
from helpers import ability, build, sink, source


def _sample_graph():
    return build(
        "sample",
        [
            ability("root", "Driving", provenance=(("doc", "driving"),)),
            ability("perceiving", "Perceiving the environment"),
            source("sensors", "information from sensors"),
            sink("actuation", "vehicle actuation"),
        ],
        [
            Edge(src="root", dst="perceiving", provenance=("doc",)),
            Edge(src="perceiving", dst="sensors"),
            Edge(src="root", dst="actuation", multiplicity=2),
        ],
        mode=GraphMode.WEAKENED,
        stage_label="transformed",
    )


def test_round_trip_is_lossless():
    g = _sample_graph()
    data = save_graph(g)
    loaded = load_graph(data)
    assert loaded.sorted_copy() == g.sorted_copy()
    assert save_graph(loaded) == data


def test_serialization_is_canonical_across_insertion_orders():
    g = _sample_graph()
    permuted = build(
        "sample",
        list(reversed(g.nodes)),
        list(reversed(g.edges)),
        mode=GraphMode.WEAKENED,
        stage_label="transformed",
    )
    assert save_graph(g) == save_graph(permuted)


def test_unsupported_version_rejected():
    doc = graph_to_document(_sample_graph())
    doc["format_version"] = 99
    with pytest.raises(UnsupportedVersion):
        load_graph(json.dumps(doc))


def test_load_checks_referential_integrity():
    doc = graph_to_document(_sample_graph())
    doc["edges"].append({"from": "root", "to": "ghost"})
    with pytest.raises(MalformedDocument) as err:
        load_graph(json.dumps(doc))
    assert "ghost" in str(err.value)


def test_load_rejects_duplicate_node_ids():
    doc = graph_to_document(_sample_graph())
    doc["nodes"].append(dict(doc["nodes"][0]))
    with pytest.raises(MalformedDocument):
        load_graph(json.dumps(doc))


def test_load_rejects_bad_multiplicity():
    doc = graph_to_document(_sample_graph())
    doc["edges"][0]["multiplicity"] = 0
    with pytest.raises(MalformedDocument):
        load_graph(json.dumps(doc))


def test_input_document_loaders():
    rename = load_rename_map(
        json.dumps(
            {
                "format_version": 1,
                "kind": "rename-map",
                "entries": [
                    {"node": "road-network", "label": "perceiving the road network"}
                ],
            }
        )
    )
    assert rename.entries[0].new_label == "perceiving the road network"
    assert rename.entries[0].ability_formulated

    annotations = load_annotations(
        json.dumps(
            {
                "format_version": 1,
                "kind": "edge-annotations",
                "entries": [
                    {"from": "a", "to": "b", "classification": "information-flow-only"}
                ],
            }
        )
    )
    assert annotations[0].src == "a"

    plan = load_terminal_plan(
        json.dumps(
            {
                "format_version": 1,
                "kind": "terminal-plan",
                "attachments": [
                    {"leaf": "x", "label": "information from sensors", "terminal": "data-source"}
                ],
            }
        )
    )
    assert plan.attachments[0].label == "information from sensors"

    spec = load_cluster_spec(
        json.dumps(
            {
                "format_version": 1,
                "kind": "cluster-spec",
                "clusters": [{"label": "motion control", "members": ["a", "b"]}],
            }
        )
    )
    assert spec.clusters[0].members == ("a", "b")

    mapping = load_coverage_mapping(
        json.dumps(
            {
                "format_version": 1,
                "kind": "coverage-mapping",
                "mapping_id": "av",
                "modules": [{"name": "planner", "abilities": ["planning"]}],
            }
        )
    )
    assert mapping.entries[0].module == "planner"

    events = load_monitor_events(
        json.dumps(
            {
                "format_version": 1,
                "kind": "monitor-events",
                "events": [
                    {"at": "t0", "module": "planner", "status": "down"},
                    {"at": "t1", "module": "planner", "score": 0.7},
                ],
            }
        )
    )
    assert events[0].status is not None
    assert events[1].score == pytest.approx(0.7)


def test_ledger_round_trip():
    data = json.dumps(
        {
            "format_version": 1,
            "kind": "decision-ledger",
            "session_id": "s1",
            "base_graph": "g1",
            "others": ["g2"],
            "candidates": [
                {
                    "candidate_id": "c001",
                    "similarity": 0.5,
                    "status": "approved",
                    "canonical_label": "perception",
                    "members": [
                        {"graph": "g1", "node": "a", "label": "perception"},
                        {"graph": "g2", "node": "b", "label": "perceiving"},
                    ],
                }
            ],
        }
    )
    ledger = load_ledger(data)
    assert ledger.candidates[0].status is CandidateStatus.APPROVED
    assert load_ledger(save_ledger(ledger)) == ledger


def test_ledger_approved_requires_canonical_label():
    data = json.dumps(
        {
            "format_version": 1,
            "kind": "decision-ledger",
            "session_id": "s1",
            "base_graph": "g1",
            "candidates": [
                {
                    "candidate_id": "c001",
                    "status": "approved",
                    "members": [
                        {"graph": "g1", "node": "a"},
                        {"graph": "g2", "node": "b"},
                    ],
                }
            ],
        }
    )
    with pytest.raises(MalformedDocument):
        load_ledger(data)


def test_stats_csv():
    rows = [
        GraphStats("imported", 37, 35, 35),
        GraphStats("transformed", 50, 49, 49),
    ]
    assert stats_to_csv(rows) == (
        "stage_label,node_count,edge_count\nimported,37,35\ntransformed,50,49\n"
    )


# -- DOT export -------------------------------------------------------------------


def test_dot_two_node_graph():
    g = build("tiny", [ability("a", "Ability A"), sink("out", "the sink")], [("a", "out")])
    text = export_dot(g)
    assert text.count("[label=") == 2
    assert '"a" -> "out";' in text
    assert "shape=box" in text and "shape=diamond" in text


def test_dot_hides_terminals_on_request():
    g = build("tiny", [ability("a"), source("sensor"), sink("out")], [("a", "sensor"), ("a", "out")])
    text = export_dot(g, show_terminals=False)
    assert '"sensor"' not in text and '"out"' not in text
    assert '"a"' in text
    assert "->" not in text.replace("digraph", "")


def test_dot_depth_limit_matches_truncate():
    names = ["r", "a", "b", "c", "d", "e"]
    g = build("chain", [ability(n) for n in names], list(zip(names, names[1:])))
    text = export_dot(g, depth_limit=4)
    expected = truncate_depth(g, 4)
    assert text.count("[label=") == len(expected.nodes)


def test_dot_requires_acyclic_only_for_depth_limits():
    g = build("loops", [ability("a"), ability("b")], [("a", "b"), ("b", "a")])
    export_dot(g)  # fine without a depth limit
    with pytest.raises(GraphCyclic):
        export_dot(g, depth_limit=2)


def test_dot_labels_multiplicity():
    g = build("mult", [ability("a"), ability("b")], [Edge(src="a", dst="b", multiplicity=3)])
    assert 'label="3"' in export_dot(g)


def test_dot_output_is_deterministic():
    g = _sample_graph()
    permuted = build(
        "sample",
        list(reversed(g.nodes)),
        list(reversed(g.edges)),
        mode=GraphMode.WEAKENED,
        stage_label="transformed",
    )
    assert export_dot(g) == export_dot(permuted)
