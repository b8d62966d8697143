"""Graph data model and structural queries.

Graphs are immutable values: every operation returns a new ``AbilityGraph``
(or a derived view) and never mutates its input. Edges form a multiset;
parallel duplicates of the same ``(src, dst, kind)`` key are only kept as
separate entries in merged graphs, elsewhere a duplicate increments the
entry's multiplicity.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

from .errors import (
    CycleIntroduced,
    DuplicateId,
    GraphCyclic,
    InformationFlowForbidden,
    MissingEndpoint,
    NodeNotFound,
)


class NodeKind(str, Enum):
    ABILITY = "ability"
    DATA_SOURCE = "data-source"
    DATA_SINK = "data-sink"


TERMINAL_KINDS = (NodeKind.DATA_SOURCE, NodeKind.DATA_SINK)


class SolutionNeutral(str, Enum):
    YES = "yes"
    NO = "no"
    UNREVIEWED = "unreviewed"


class EdgeKind(str, Enum):
    QUALITY = "quality-dependency"
    FLOW = "information-flow"


class GraphMode(str, Enum):
    RAW = "raw"
    WEAKENED = "weakened"
    STRICT = "strict"
    MERGED = "merged"


_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(text: str) -> str:
    """Lowercase slug of ``text``: letters, digits and hyphens only."""
    slug = _SLUG_RE.sub("-", text.lower()).strip("-")
    if not slug:
        raise ValueError(f"cannot derive a slug from {text!r}")
    return slug


@dataclass(frozen=True)
class Node:
    """An ability, data source or data sink.

    ``provenance`` is an ordered list of ``(source_graph_id, original_label)``
    pairs tracing the node back through imports, renames and merges. The id is
    stable across transformations; only labels change.
    """

    id: str
    label: str
    kind: NodeKind = NodeKind.ABILITY
    solution_neutral: SolutionNeutral = SolutionNeutral.UNREVIEWED
    ability_formulated: bool = False
    provenance: tuple[tuple[str, str], ...] = ()
    cluster_tag: str | None = None

    @property
    def is_terminal(self) -> bool:
        return self.kind in TERMINAL_KINDS


@dataclass(frozen=True)
class Edge:
    """Directed dependency from a super-ability toward what it depends on."""

    src: str
    dst: str
    kind: EdgeKind = EdgeKind.QUALITY
    multiplicity: int = 1
    provenance: tuple[str, ...] = ()

    @property
    def key(self) -> tuple[str, str, EdgeKind]:
        return (self.src, self.dst, self.kind)


@dataclass(frozen=True)
class GraphStats:
    """Node/edge counts for one pipeline stage.

    ``edge_count`` counts the edge multiset (multiplicities included);
    ``distinct_edge_count`` counts distinct ``(src, dst, kind)`` keys and is
    reported alongside.
    """

    stage_label: str
    node_count: int
    edge_count: int
    distinct_edge_count: int


@dataclass(frozen=True)
class AbilityGraph:
    id: str
    mode: GraphMode = GraphMode.RAW
    nodes: tuple[Node, ...] = ()
    edges: tuple[Edge, ...] = ()
    stage_label: str | None = None
    is_view: bool = False

    # -- lookups -----------------------------------------------------------

    @cached_property
    def _by_id(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _children(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.dst not in out[e.src]:
                out[e.src].append(e.dst)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    @cached_property
    def _parents(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.src not in out[e.dst]:
                out[e.dst].append(e.src)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    def has_node(self, node_id: str) -> bool:
        return node_id in self._by_id

    def node(self, node_id: str) -> Node:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise NodeNotFound(f"graph {self.id!r} has no node {node_id!r}") from None

    def children(self, node_id: str) -> tuple[str, ...]:
        self.node(node_id)
        return self._children[node_id]

    def parents(self, node_id: str) -> tuple[str, ...]:
        self.node(node_id)
        return self._parents[node_id]

    def ability_children(self, node_id: str) -> tuple[str, ...]:
        return tuple(c for c in self.children(node_id) if self._by_id[c].kind is NodeKind.ABILITY)

    def out_degree(self, node_id: str) -> int:
        return len(self.children(node_id))

    def in_degree(self, node_id: str) -> int:
        return len(self.parents(node_id))

    def ability_nodes(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.ABILITY)

    def terminal_nodes(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.is_terminal)

    def roots(self) -> tuple[str, ...]:
        """Ids of in-degree-0 nodes, sorted."""
        return tuple(sorted(n.id for n in self.nodes if not self._parents[n.id]))

    def edge_entries(self, src: str, dst: str) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.src == src and e.dst == dst)

    # -- derived forms ------------------------------------------------------

    def sorted_copy(self) -> "AbilityGraph":
        """Same graph with nodes and edges in canonical order."""
        nodes = tuple(sorted(self.nodes, key=lambda n: n.id))
        edges = tuple(
            sorted(self.edges, key=lambda e: (e.src, e.dst, e.kind.value, e.multiplicity, e.provenance))
        )
        return replace(self, nodes=nodes, edges=edges)


# ---------------------------------------------------------------------------
# structural algorithms


def find_cycle(graph: AbilityGraph) -> list[str] | None:
    """Return one directed cycle as ``[a, ..., a]``, or None if acyclic.

    Multiplicity and edge kind are irrelevant here; self-loops count.
    """
    adjacency = {n.id: graph._children[n.id] for n in graph.nodes}
    color: dict[str, int] = {}  # 0 unseen / 1 on stack / 2 done
    stack: list[str] = []

    def dfs(start: str) -> list[str] | None:
        # iterative DFS keeping the current path for cycle extraction
        work: list[tuple[str, int]] = [(start, 0)]
        while work:
            node, idx = work.pop()
            if idx == 0:
                color[node] = 1
                stack.append(node)
            kids = adjacency[node]
            if idx < len(kids):
                work.append((node, idx + 1))
                child = kids[idx]
                state = color.get(child, 0)
                if state == 1:
                    return stack[stack.index(child):] + [child]
                if state == 0:
                    work.append((child, 0))
            else:
                color[node] = 2
                stack.pop()
        return None

    for node_id in sorted(adjacency):
        if color.get(node_id, 0) == 0:
            cycle = dfs(node_id)
            if cycle:
                return cycle
    return None


def topological_order(graph: AbilityGraph) -> list[str]:
    """Kahn order (deterministic: ties resolved by id). Raises GraphCyclic."""
    indegree = {n.id: len(graph._parents[n.id]) for n in graph.nodes}
    ready = sorted(nid for nid, d in indegree.items() if d == 0)
    queue = deque(ready)
    order: list[str] = []
    remaining_parents = dict(indegree)
    while queue:
        nid = queue.popleft()
        order.append(nid)
        pending = []
        for child in graph._children[nid]:
            remaining_parents[child] -= 1
            if remaining_parents[child] == 0:
                pending.append(child)
        for child in sorted(pending):
            queue.append(child)
    if len(order) != len(graph.nodes):
        cycle = find_cycle(graph) or []
        raise GraphCyclic(f"graph {graph.id!r} contains a cycle: {' -> '.join(cycle)}", cycle=cycle)
    return order


def depths(graph: AbilityGraph) -> dict[str, int]:
    """Longest-path depth from any root (in-degree-0 node); roots are 0."""
    order = topological_order(graph)
    depth = {nid: 0 for nid in order}
    for nid in order:
        for child in graph._children[nid]:
            depth[child] = max(depth[child], depth[nid] + 1)
    return depth


# ---------------------------------------------------------------------------
# operations


def add_node(graph: AbilityGraph, node: Node) -> AbilityGraph:
    if graph.has_node(node.id):
        raise DuplicateId(f"graph {graph.id!r} already has a node {node.id!r}")
    return replace(graph, nodes=graph.nodes + (node,))


def add_edge(graph: AbilityGraph, edge: Edge) -> AbilityGraph:
    for endpoint in (edge.src, edge.dst):
        if not graph.has_node(endpoint):
            raise MissingEndpoint(f"graph {graph.id!r} has no node {endpoint!r} for edge {edge.src}->{edge.dst}")
    if edge.kind is EdgeKind.FLOW and graph.mode is not GraphMode.RAW:
        raise InformationFlowForbidden(
            f"information-flow edge {edge.src}->{edge.dst} is only allowed in raw graphs"
        )
    if graph.mode is not GraphMode.RAW:
        if edge.src == edge.dst:
            raise CycleIntroduced(
                f"edge {edge.src}->{edge.dst} is a self-loop", cycle=[edge.src, edge.dst]
            )
        path = _path(graph, edge.dst, edge.src)
        if path is not None:
            cycle = path + [edge.dst]
            raise CycleIntroduced(
                f"edge {edge.src}->{edge.dst} would close the cycle {' -> '.join(cycle)}",
                cycle=cycle,
            )
    if graph.mode is not GraphMode.MERGED:
        for i, existing in enumerate(graph.edges):
            if existing.key == edge.key:
                merged = replace(
                    existing,
                    multiplicity=existing.multiplicity + edge.multiplicity,
                    provenance=_merge_edge_provenance(existing.provenance, edge.provenance),
                )
                edges = graph.edges[:i] + (merged,) + graph.edges[i + 1:]
                return replace(graph, edges=edges)
    return replace(graph, edges=graph.edges + (edge,))


def _merge_edge_provenance(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
    out = list(a)
    for item in b:
        if item not in out:
            out.append(item)
    return tuple(out)


def _path(graph: AbilityGraph, start: str, goal: str) -> list[str] | None:
    """BFS path from start to goal (inclusive), None if unreachable."""
    if start == goal:
        return [start]
    previous: dict[str, str] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        nid = queue.popleft()
        for child in graph._children[nid]:
            if child in seen:
                continue
            previous[child] = nid
            if child == goal:
                path = [goal]
                while path[-1] != start:
                    path.append(previous[path[-1]])
                return list(reversed(path))
            seen.add(child)
            queue.append(child)
    return None


def depth_of(graph: AbilityGraph, node_id: str) -> int:
    graph.node(node_id)
    return depths(graph)[node_id]


def truncate_depth(graph: AbilityGraph, max_depth: int) -> AbilityGraph:
    """View with only the nodes of depth <= max_depth and the edges among them."""
    if max_depth < 1:
        raise ValueError("max_depth must be a positive integer")
    depth = depths(graph)
    keep = {nid for nid, d in depth.items() if d <= max_depth}
    nodes = tuple(n for n in graph.nodes if n.id in keep)
    edges = tuple(e for e in graph.edges if e.src in keep and e.dst in keep)
    return replace(graph, nodes=nodes, edges=edges, is_view=True)


def strip_terminals(graph: AbilityGraph) -> AbilityGraph:
    """View without data sources/sinks and their incident edges."""
    keep = {n.id for n in graph.nodes if not n.is_terminal}
    nodes = tuple(n for n in graph.nodes if n.id in keep)
    edges = tuple(e for e in graph.edges if e.src in keep and e.dst in keep)
    return replace(graph, nodes=nodes, edges=edges, is_view=True)


def stats(graph: AbilityGraph, stage_label: str | None = None) -> GraphStats:
    label = stage_label if stage_label is not None else (graph.stage_label or graph.mode.value)
    return GraphStats(
        stage_label=label,
        node_count=len(graph.nodes),
        edge_count=sum(e.multiplicity for e in graph.edges),
        distinct_edge_count=len({e.key for e in graph.edges}),
    )
