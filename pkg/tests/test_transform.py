import random

import pytest

from abig.errors import (
    EdgeNotFound,
    EmptyDocument,
    InconsistentIndentation,
    MissingEndpoint,
    MultipleRoots,
    NodeNotFound,
    NotALeaf,
    UnannotatedEdge,
    UncoveredLeaf,
)
from abig.model import Edge, EdgeKind, GraphMode, NodeKind, SolutionNeutral, find_cycle
from abig.transform import (
    EdgeAnnotation,
    EdgeClass,
    RenameEntry,
    RenameMap,
    TerminalAttachment,
    TerminalPlan,
    attach_terminals,
    collapse_single_child_chains,
    drop_non_solution_neutral,
    import_edge_list,
    import_hierarchy,
    import_node_link,
    prune_information_flow_edges,
    rename_abilities,
)
from helpers import ability, build, random_dag, reachable_pairs, sink, source


# -- step 1: imports ---------------------------------------------------------


def test_import_hierarchy_four_categories():
    text = (
        "vehicle guidance\n"
        "  information sources\n"
        "  assessment tasks\n"
        "  decision and thinking processes\n"
        "  vehicle handling\n"
    )
    g = import_hierarchy(text, "fastenmeier")
    assert len(g.nodes) == 5
    assert len(g.edges) == 4
    assert g.mode is GraphMode.RAW
    assert all(e.src == "vehicle-guidance" for e in g.edges)
    assert g.node("information-sources").provenance == (("fastenmeier", "information sources"),)


def test_import_hierarchy_single_line():
    g = import_hierarchy("driving\n", "doc")
    assert len(g.nodes) == 1
    assert len(g.edges) == 0


def test_import_hierarchy_depth_jump_rejected():
    with pytest.raises(InconsistentIndentation):
        import_hierarchy("root\n    grandchild\n", "doc")


def test_import_hierarchy_multiple_roots_rejected():
    with pytest.raises(MultipleRoots):
        import_hierarchy("a\nb\n", "doc")


def test_import_hierarchy_empty_document():
    with pytest.raises(EmptyDocument):
        import_hierarchy("\n  \n", "doc")


def test_import_hierarchy_nested_levels():
    text = "a\n  b\n    c\n  d\n"
    g = import_hierarchy(text, "doc")
    assert {(e.src, e.dst) for e in g.edges} == {("a", "b"), ("b", "c"), ("a", "d")}


def test_import_node_link_donges_chain():
    document = {
        "nodes": [
            {"label": "navigation"},
            {"label": "guidance"},
            {"label": "stabilization"},
        ],
        "links": [
            {"from": "navigation", "to": "guidance"},
            {"from": "guidance", "to": "stabilization"},
        ],
    }
    g = import_node_link(document, "donges")
    assert len(g.nodes) == 3
    assert len(g.edges) == 2
    assert all(e.kind is EdgeKind.FLOW for e in g.edges)


def test_import_node_link_containment_is_provenance_only():
    document = {
        "nodes": [
            {"label": "processing", "contains": ["stage-a", "stage-b"]},
            {"id": "stage-a", "label": "stage a"},
            {"id": "stage-b", "label": "stage b"},
        ],
        "links": [{"from": "stage-a", "to": "stage-b"}],
    }
    g = import_node_link(document, "wickens")
    assert len(g.edges) == 1  # the cross-link only, never the containment
    assert ("wickens", "contained in processing") in g.node("stage-a").provenance


def test_import_node_link_unknown_endpoint():
    document = {
        "nodes": [{"label": "a"}],
        "links": [{"from": "a", "to": "ghost"}],
    }
    with pytest.raises(MissingEndpoint):
        import_node_link(document, "doc")


def test_import_node_link_declared_terminals():
    document = {
        "nodes": [
            {"label": "perceiving"},
            {"label": "environmental influences", "kind": "data-source"},
        ],
        "links": [{"from": "perceiving", "to": "environmental influences"}],
    }
    g = import_node_link(document, "doc")
    assert g.node("environmental-influences").kind is NodeKind.DATA_SOURCE


def test_import_edge_list():
    text = "driving task -> primary driving task\ndriving task -> secondary driving task\n"
    g = import_edge_list(text, "bubb")
    assert len(g.nodes) == 3
    assert len(g.edges) == 2


# -- renaming ----------------------------------------------------------------


def test_rename_road_network_example():
    g = import_edge_list("road network -> signage", "doc")
    renamed = rename_abilities(
        g,
        RenameMap(
            entries=(
                RenameEntry("road-network", "perceiving the road network", True, SolutionNeutral.YES),
            )
        ),
    )
    node = renamed.node("road-network")
    assert node.label == "perceiving the road network"
    assert node.ability_formulated
    assert node.solution_neutral is SolutionNeutral.YES
    assert ("doc", "road network") in node.provenance


def test_rename_with_empty_map_is_identity():
    g = import_edge_list("a -> b", "doc")
    assert rename_abilities(g, RenameMap()) == g


def test_rename_twice_stacks_provenance_in_order():
    g = import_edge_list("road network -> signage", "doc")
    first = rename_abilities(
        g, RenameMap(entries=(RenameEntry("road-network", "label one"),))
    )
    second = rename_abilities(
        first, RenameMap(entries=(RenameEntry("road-network", "label two"),))
    )
    assert second.node("road-network").provenance == (
        ("doc", "road network"),
        ("doc", "label one"),
    )


def test_rename_unknown_node():
    g = import_edge_list("a -> b", "doc")
    with pytest.raises(NodeNotFound):
        rename_abilities(g, RenameMap(entries=(RenameEntry("ghost", "x"),)))


# -- dropping non-neutral nodes ----------------------------------------------


def test_drop_rewires_chain():
    # a -> h -> b with h non-neutral (the navigation-audio case)
    g = build(
        "t",
        [
            ability("a"),
            ability("h", "listening to the audio output of a navigation system",
                    neutral=SolutionNeutral.NO),
            ability("b"),
        ],
        [("a", "h"), ("h", "b")],
        mode=GraphMode.RAW,
    )
    out = drop_non_solution_neutral(g)
    assert {n.id for n in out.nodes} == {"a", "b"}
    assert {(e.src, e.dst) for e in out.edges} == {("a", "b")}
    assert any(p.startswith("bypassed:h") for p in out.edges[0].provenance)


def test_drop_identity_when_all_neutral():
    g = build("t", [ability("a"), ability("b")], [("a", "b")])
    assert drop_non_solution_neutral(g) == g


def test_drop_bipartite_rewiring():
    # two parents and two children around the removed node: 4 rewired edges
    g = build(
        "t",
        [
            ability("p1"), ability("p2"),
            ability("h", neutral=SolutionNeutral.NO),
            ability("c1"), ability("c2"),
        ],
        [("p1", "h"), ("p2", "h"), ("h", "c1"), ("h", "c2")],
        mode=GraphMode.RAW,
    )
    out = drop_non_solution_neutral(g)
    assert {(e.src, e.dst) for e in out.edges} == {
        ("p1", "c1"), ("p1", "c2"), ("p2", "c1"), ("p2", "c2")
    }


def test_drop_keeps_unreviewed_nodes():
    g = build(
        "t",
        [ability("a", neutral=SolutionNeutral.UNREVIEWED)],
        [],
    )
    assert drop_non_solution_neutral(g) == g


def test_drop_preserves_reachability_of_survivors():
    rng = random.Random(41)
    for _ in range(40):
        g = random_dag(rng, rng.randint(2, 12), edge_prob=0.3, neutral_prob=0.3)
        survivors = {n.id for n in g.nodes if n.solution_neutral is not SolutionNeutral.NO}
        before = {
            (x, y) for x, y in reachable_pairs(g) if x in survivors and y in survivors
        }
        out = drop_non_solution_neutral(g)
        assert {n.id for n in out.nodes} == survivors
        assert reachable_pairs(out) == before
        assert find_cycle(out) is None


# -- pruning information-flow edges -------------------------------------------


def _annotate(graph, flow_only=()):
    pairs = {(e.src, e.dst) for e in graph.edges}
    return [
        EdgeAnnotation(
            src, dst,
            EdgeClass.INFORMATION_FLOW_ONLY if (src, dst) in flow_only else EdgeClass.QUALITY_DEPENDENCY,
        )
        for src, dst in sorted(pairs)
    ]


def test_prune_removes_flow_only_edges():
    g = build(
        "t",
        [ability(n) for n in ("a", "b", "c", "d")],
        [
            Edge(src="a", dst="b", kind=EdgeKind.FLOW),
            Edge(src="a", dst="c", kind=EdgeKind.FLOW),
            Edge(src="c", dst="d", kind=EdgeKind.FLOW),
        ],
        mode=GraphMode.RAW,
    )
    out = prune_information_flow_edges(g, _annotate(g, flow_only={("a", "b")}))
    assert {(e.src, e.dst) for e in out.edges} == {("a", "c"), ("c", "d")}
    assert all(e.kind is EdgeKind.QUALITY for e in out.edges)
    assert out.mode is GraphMode.WEAKENED


def test_prune_rekind_only_keeps_topology():
    g = build(
        "t",
        [ability("a"), ability("b")],
        [Edge(src="a", dst="b", kind=EdgeKind.FLOW)],
        mode=GraphMode.RAW,
    )
    out = prune_information_flow_edges(g, _annotate(g))
    assert {(e.src, e.dst) for e in out.edges} == {("a", "b")}
    assert out.edges[0].kind is EdgeKind.QUALITY


def test_prune_never_changes_the_node_set():
    rng = random.Random(13)
    for _ in range(20):
        g = random_dag(rng, rng.randint(1, 10), edge_prob=0.4, mode=GraphMode.RAW)
        flow_only = {
            (e.src, e.dst) for e in g.edges if rng.random() < 0.5
        }
        out = prune_information_flow_edges(g, _annotate(g, flow_only=flow_only))
        assert {n.id for n in out.nodes} == {n.id for n in g.nodes}


def test_prune_missing_annotation_lists_the_edge():
    g = build(
        "t",
        [ability("a"), ability("b"), ability("c")],
        [Edge(src="a", dst="b", kind=EdgeKind.FLOW), Edge(src="b", dst="c", kind=EdgeKind.FLOW)],
        mode=GraphMode.RAW,
    )
    with pytest.raises(UnannotatedEdge) as err:
        prune_information_flow_edges(
            g, [EdgeAnnotation("a", "b", EdgeClass.QUALITY_DEPENDENCY)]
        )
    assert err.value.edges == [("b", "c")]


def test_prune_rejects_annotations_for_unknown_edges():
    g = build("t", [ability("a"), ability("b")], [Edge(src="a", dst="b", kind=EdgeKind.FLOW)],
              mode=GraphMode.RAW)
    with pytest.raises(EdgeNotFound):
        prune_information_flow_edges(
            g,
            [
                EdgeAnnotation("a", "b", EdgeClass.QUALITY_DEPENDENCY),
                EdgeAnnotation("b", "a", EdgeClass.QUALITY_DEPENDENCY),
            ],
        )


def test_prune_resolves_dual_direction_raw_cycles():
    # flow one way, quality dependency the other: pruning the flow edge
    # leaves a DAG
    g = build(
        "t",
        [ability("perceiving"), ability("deciding")],
        [
            Edge(src="perceiving", dst="deciding", kind=EdgeKind.FLOW),
            Edge(src="deciding", dst="perceiving", kind=EdgeKind.FLOW),
        ],
        mode=GraphMode.RAW,
    )
    assert find_cycle(g) is not None
    out = prune_information_flow_edges(
        g, _annotate(g, flow_only={("perceiving", "deciding")})
    )
    assert find_cycle(out) is None


# -- terminal attachment -------------------------------------------------------


def test_attach_terminal_to_leaf():
    g = build("t", [ability("perceiving-the-road-surface")], [], mode=GraphMode.WEAKENED)
    out = attach_terminals(
        g,
        TerminalPlan(
            attachments=(
                TerminalAttachment("perceiving-the-road-surface", "information from sensors",
                                   NodeKind.DATA_SOURCE),
            )
        ),
    )
    assert out.node("information-from-sensors").kind is NodeKind.DATA_SOURCE
    assert {(e.src, e.dst) for e in out.edges} == {
        ("perceiving-the-road-surface", "information-from-sensors")
    }


def test_attach_with_empty_plan_on_terminated_graph():
    g = build("t", [ability("a"), sink("out")], [("a", "out")])
    assert attach_terminals(g, TerminalPlan()) == g


def test_attach_rejects_internal_nodes():
    g = build("t", [ability("a"), ability("b"), sink("out")], [("a", "b"), ("b", "out")])
    with pytest.raises(NotALeaf):
        attach_terminals(
            g,
            TerminalPlan(attachments=(TerminalAttachment("a", "x", NodeKind.DATA_SINK),)),
        )


def test_attach_reports_uncovered_leaves():
    g = build("t", [ability("a"), ability("b")], [("a", "b")])
    with pytest.raises(UncoveredLeaf) as err:
        attach_terminals(g, TerminalPlan())
    assert err.value.leaves == ["b"]


def test_attach_shares_equal_terminals():
    g = build("t", [ability("a"), ability("b"), ability("r")], [("r", "a"), ("r", "b")])
    out = attach_terminals(
        g,
        TerminalPlan(
            attachments=(
                TerminalAttachment("a", "information from sensors", NodeKind.DATA_SOURCE),
                TerminalAttachment("b", "information from sensors", NodeKind.DATA_SOURCE),
            )
        ),
    )
    terminals = [n for n in out.nodes if n.is_terminal]
    assert len(terminals) == 1
    assert out.in_degree("information-from-sensors") == 2


# -- chain collapse ------------------------------------------------------------


def test_collapse_fuses_parent_and_only_child():
    g = build(
        "t",
        [ability("a", "Guidance"), ability("b", "Stabilization"), sink("out")],
        [("a", "b"), ("b", "out")],
    )
    out = collapse_single_child_chains(g)
    assert len(out.nodes) == 2
    fused = out.node("a")
    assert fused.label == "Guidance – Stabilization"
    assert {(e.src, e.dst) for e in out.edges} == {("a", "out")}


def test_collapse_leaves_terminal_children_alone():
    g = build("t", [ability("a"), sink("out")], [("a", "out")])
    assert collapse_single_child_chains(g) == g


def test_collapse_chain_of_four_reaches_fixpoint_and_is_idempotent():
    names = ["a", "b", "c", "d"]
    g = build(
        "t",
        [ability(n, n.upper()) for n in names] + [sink("out")],
        list(zip(names, names[1:])) + [("d", "out")],
    )
    once = collapse_single_child_chains(g)
    assert len([n for n in once.nodes if n.kind is NodeKind.ABILITY]) == 1
    assert once.node("a").label == "A – B – C – D"
    twice = collapse_single_child_chains(once)
    assert once.sorted_copy() == twice.sorted_copy()


def test_collapse_skips_children_with_several_parents():
    # b has two parents; fusing it into either would steal it from the other
    g = build(
        "t",
        [ability("a"), ability("c"), ability("b"), sink("out")],
        [("a", "b"), ("c", "b"), ("b", "out")],
    )
    out = collapse_single_child_chains(g)
    assert {n.id for n in out.nodes} == {"a", "b", "c", "out"}


def test_collapse_is_confluent_on_random_chains():
    # randomized fusion order is forced through shuffled node ids; the
    # canonical result must not depend on it
    rng = random.Random(97)
    for _ in range(15):
        length = rng.randint(2, 6)
        names = [f"n{i}" for i in range(length)]
        labels = {n: n.upper() for n in names}
        shuffled = names[:]
        rng.shuffle(shuffled)
        g = build(
            "t",
            [ability(n, labels[n]) for n in shuffled] + [sink("out")],
            list(zip(names, names[1:])) + [(names[-1], "out")],
        )
        out = collapse_single_child_chains(g)
        abilities = [n for n in out.nodes if n.kind is NodeKind.ABILITY]
        assert len(abilities) == 1
        assert abilities[0].label == " – ".join(labels[n] for n in names)


def test_transforms_preserve_acyclicity():
    rng = random.Random(53)
    for _ in range(25):
        g = random_dag(rng, rng.randint(2, 10), edge_prob=0.35, neutral_prob=0.2,
                       mode=GraphMode.RAW)
        out = drop_non_solution_neutral(g)
        assert find_cycle(out) is None
        out = prune_information_flow_edges(out, _annotate(out))
        assert find_cycle(out) is None
        out = collapse_single_child_chains(out)
        assert find_cycle(out) is None
