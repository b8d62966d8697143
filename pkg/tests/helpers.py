"""Shared fixture builders and independent oracles.

The oracles here are deliberately naive (path enumeration, closure matrices,
quotient-by-definition) so they stay independent of the implementations they
check.
"""

from __future__ import annotations

import random

from abig.model import (
    AbilityGraph,
    Edge,
    EdgeKind,
    GraphMode,
    Node,
    NodeKind,
    SolutionNeutral,
)


def ability(
    node_id: str,
    label: str | None = None,
    neutral: SolutionNeutral = SolutionNeutral.YES,
    formulated: bool = True,
    provenance: tuple[tuple[str, str], ...] = (),
) -> Node:
    return Node(
        id=node_id,
        label=label or node_id,
        kind=NodeKind.ABILITY,
        solution_neutral=neutral,
        ability_formulated=formulated,
        provenance=provenance,
    )


def source(node_id: str, label: str | None = None) -> Node:
    return Node(
        id=node_id,
        label=label or node_id,
        kind=NodeKind.DATA_SOURCE,
        solution_neutral=SolutionNeutral.YES,
        ability_formulated=True,
    )


def sink(node_id: str, label: str | None = None) -> Node:
    return Node(
        id=node_id,
        label=label or node_id,
        kind=NodeKind.DATA_SINK,
        solution_neutral=SolutionNeutral.YES,
        ability_formulated=True,
    )


def build(
    graph_id: str,
    nodes: list[Node],
    edges: list[tuple[str, str]] | list[Edge],
    mode: GraphMode = GraphMode.WEAKENED,
    **kwargs,
) -> AbilityGraph:
    """Construct a graph directly (no add_edge checks), for fixtures of any shape."""
    built = tuple(
        e if isinstance(e, Edge) else Edge(src=e[0], dst=e[1], kind=EdgeKind.QUALITY)
        for e in edges
    )
    return AbilityGraph(id=graph_id, mode=mode, nodes=tuple(nodes), edges=built, **kwargs)


def random_dag(
    rng: random.Random,
    n_nodes: int,
    edge_prob: float = 0.3,
    graph_id: str = "g",
    mode: GraphMode = GraphMode.WEAKENED,
    neutral_prob: float = 0.0,
) -> AbilityGraph:
    """Random DAG over abilities n0..n{k}; edges only go forward in index order."""
    nodes = []
    for i in range(n_nodes):
        neutrality = (
            SolutionNeutral.NO if rng.random() < neutral_prob else SolutionNeutral.YES
        )
        nodes.append(ability(f"{graph_id}-n{i}", f"{graph_id} node {i}", neutral=neutrality))
    edges = []
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < edge_prob:
                edges.append(Edge(src=f"{graph_id}-n{i}", dst=f"{graph_id}-n{j}"))
    return AbilityGraph(id=graph_id, mode=mode, nodes=tuple(nodes), edges=tuple(edges))


# ---------------------------------------------------------------------------
# oracles


def enumerate_depth(graph: AbilityGraph, node_id: str) -> int:
    """Longest path length from any in-degree-0 node, by full path enumeration."""
    parents: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for e in graph.edges:
        if e.src not in parents[e.dst]:
            parents[e.dst].append(e.src)

    best = 0
    stack: list[tuple[str, int]] = [(node_id, 0)]
    while stack:
        current, length = stack.pop()
        if not parents[current]:
            best = max(best, length)
        for p in parents[current]:
            stack.append((p, length + 1))
    return best


def reachable_pairs(graph: AbilityGraph) -> set[tuple[str, str]]:
    """All ordered pairs (x, y), x != y, with a directed path x -> ... -> y."""
    ids = [n.id for n in graph.nodes]
    reach = {nid: {e.dst for e in graph.edges if e.src == nid} for nid in ids}
    changed = True
    while changed:
        changed = False
        for nid in ids:
            extra = set()
            for mid in reach[nid]:
                extra |= reach[mid]
            if not extra <= reach[nid]:
                reach[nid] |= extra
                changed = True
    return {(x, y) for x in ids for y in reach[x] if x != y}


def quotient_edges(
    graph: AbilityGraph, mapping: dict[str, str]
) -> list[tuple[str, str, str, int]]:
    """Edge multiset of the quotient graph under ``mapping``, self-loops dropped."""
    out = []
    for e in graph.edges:
        src, dst = mapping[e.src], mapping[e.dst]
        if src == dst:
            continue
        out.append((src, dst, e.kind.value, e.multiplicity))
    return sorted(out)


# ---------------------------------------------------------------------------
# minimal one-rule validation fixtures


def rule_isolation_fixtures():
    """One (rule name, graph, check mode) triple per validation rule.

    Each graph violates exactly its rule under the given mode.
    """
    from abig.validation import CheckMode, Rule

    fixtures = []

    # strict: ability with exactly one sub-ability
    fixtures.append(
        (
            Rule.SUB_ABILITY_COUNT,
            build(
                "only-child",
                [ability("root"), ability("child"), sink("out-a"), sink("out-b")],
                [("root", "child"), ("child", "out-a"), ("child", "out-b")],
            ),
            CheckMode.STRICT,
        )
    )

    # weakened: ability leaf without a terminal
    fixtures.append(
        (
            Rule.LEAF_NOT_TERMINAL,
            build("bare-leaf", [ability("a"), ability("b")], [("a", "b")]),
            CheckMode.WEAKENED,
        )
    )

    # weakened: non-neutral ability
    fixtures.append(
        (
            Rule.NOT_SOLUTION_NEUTRAL,
            build(
                "non-neutral",
                [ability("a", neutral=SolutionNeutral.NO), sink("out")],
                [("a", "out")],
            ),
            CheckMode.WEAKENED,
        )
    )

    # weakened: curator has not confirmed the ability formulation
    fixtures.append(
        (
            Rule.NOT_ABILITY_FORMULATED,
            build(
                "unformulated",
                [ability("a", formulated=False), sink("out")],
                [("a", "out")],
            ),
            CheckMode.WEAKENED,
        )
    )

    # weakened: two-node cycle (no leaves, so nothing else fires)
    fixtures.append(
        (
            Rule.CYCLE_PRESENT,
            build("cyclic", [ability("a"), ability("b")], [("a", "b"), ("b", "a")]),
            CheckMode.WEAKENED,
        )
    )

    # weakened: information-flow edge outside raw mode
    fixtures.append(
        (
            Rule.INFORMATION_FLOW_EDGE,
            build(
                "flow-edge",
                [ability("a"), sink("out")],
                [Edge(src="a", dst="out", kind=EdgeKind.FLOW)],
            ),
            CheckMode.WEAKENED,
        )
    )

    # strict: two ability roots
    fixtures.append(
        (
            Rule.ROOT_CARDINALITY,
            build(
                "two-roots",
                [ability("r1"), ability("r2"), sink("out-a"), sink("out-b")],
                [("r1", "out-a"), ("r1", "out-b"), ("r2", "out-a"), ("r2", "out-b")],
                mode=GraphMode.STRICT,
            ),
            CheckMode.STRICT,
        )
    )

    # weakened: terminal with outgoing edges
    fixtures.append(
        (
            Rule.TERMINAL_HAS_CHILDREN,
            build("terminal-parent", [source("in"), sink("out")], [("in", "out")]),
            CheckMode.WEAKENED,
        )
    )

    return fixtures
