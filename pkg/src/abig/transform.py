"""Import of source task descriptions and transformation into weakened ability graphs.

The step-2 pipeline order is fixed: rename -> drop non-neutral -> prune
information-flow edges -> attach terminals -> collapse single-child chains.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    DuplicateId,
    EdgeNotFound,
    EmptyDocument,
    GraphCyclic,
    InconsistentIndentation,
    MalformedDocument,
    MissingEndpoint,
    MultipleRoots,
    NodeNotFound,
    NotALeaf,
    UnannotatedEdge,
    UncoveredLeaf,
)
from .model import (
    AbilityGraph,
    Edge,
    EdgeKind,
    GraphMode,
    Node,
    NodeKind,
    SolutionNeutral,
    find_cycle,
    slugify,
)

INDENT_UNIT = 2


# ---------------------------------------------------------------------------
# curated input types


@dataclass(frozen=True)
class RenameEntry:
    node_id: str
    new_label: str
    ability_formulated: bool = True
    solution_neutral: SolutionNeutral = SolutionNeutral.YES


@dataclass(frozen=True)
class RenameMap:
    entries: tuple[RenameEntry, ...] = ()


class EdgeClass(str, Enum):
    QUALITY_DEPENDENCY = "quality-dependency"
    INFORMATION_FLOW_ONLY = "information-flow-only"


@dataclass(frozen=True)
class EdgeAnnotation:
    src: str
    dst: str
    classification: EdgeClass


@dataclass(frozen=True)
class TerminalAttachment:
    leaf: str
    label: str
    kind: NodeKind


@dataclass(frozen=True)
class TerminalPlan:
    attachments: tuple[TerminalAttachment, ...] = ()


# ---------------------------------------------------------------------------
# step 1: imports


def _fresh_id(label: str, taken: set[str]) -> str:
    try:
        base = slugify(label)
    except ValueError:
        raise MalformedDocument(f"cannot derive a node id from label {label!r}") from None
    candidate = base
    n = 1
    while candidate in taken:
        n += 1
        candidate = f"{base}-{n}"
    taken.add(candidate)
    return candidate


def import_hierarchy(text: str, doc_id: str) -> AbilityGraph:
    """Import an indented outline (2-space unit, one root line) as a raw graph.

    Every line becomes an ability node; the parent of a line is the nearest
    shallower preceding line.
    """
    lines = [
        (number, raw)
        for number, raw in enumerate(text.splitlines(), start=1)
        if raw.strip() and not raw.lstrip().startswith("#")
    ]
    if not lines:
        raise EmptyDocument(f"outline document {doc_id!r} has no content lines")

    nodes: list[Node] = []
    edges: list[Edge] = []
    taken: set[str] = set()
    # stack of (depth, node_id) from root to the current branch
    stack: list[tuple[int, str]] = []
    for number, raw in lines:
        stripped = raw.lstrip(" ")
        indent = len(raw) - len(stripped)
        if indent % INDENT_UNIT:
            raise InconsistentIndentation(
                f"line {number}: indentation of {indent} spaces is not a multiple of {INDENT_UNIT}",
                line_number=number,
            )
        depth = indent // INDENT_UNIT
        if not stack:
            if depth != 0:
                raise InconsistentIndentation(
                    f"line {number}: first line must not be indented", line_number=number
                )
        else:
            if depth == 0:
                raise MultipleRoots(f"line {number}: outline documents allow exactly one level-0 line")
            if depth > stack[-1][0] + 1:
                raise InconsistentIndentation(
                    f"line {number}: depth jumps from {stack[-1][0]} to {depth}", line_number=number
                )
        label = stripped.rstrip()
        node_id = _fresh_id(label, taken)
        nodes.append(
            Node(id=node_id, label=label, provenance=((doc_id, label),))
        )
        while stack and stack[-1][0] >= depth:
            stack.pop()
        if stack:
            edges.append(Edge(src=stack[-1][1], dst=node_id, kind=EdgeKind.FLOW, provenance=(doc_id,)))
        stack.append((depth, node_id))

    return AbilityGraph(
        id=doc_id, mode=GraphMode.RAW, nodes=tuple(nodes), edges=tuple(edges), stage_label="imported"
    )


def import_node_link(document: dict, doc_id: str) -> AbilityGraph:
    """Import a node-link document (declared nodes, explicit links).

    Containment (``contains`` lists) is recorded as provenance notes on the
    contained nodes, never as edges. Node kind defaults to ability; links
    default to information-flow.
    """
    if not isinstance(document, dict):
        raise MalformedDocument("node-link document must be a JSON object")
    raw_nodes = document.get("nodes")
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise MalformedDocument("node-link document needs a non-empty 'nodes' list", locus="nodes")

    nodes: dict[str, Node] = {}
    for index, item in enumerate(raw_nodes):
        locus = f"nodes[{index}]"
        if not isinstance(item, dict) or "label" not in item:
            raise MalformedDocument("node entries need at least a 'label'", locus=locus)
        label = str(item["label"])
        if item.get("id"):
            node_id = str(item["id"])
        else:
            try:
                node_id = slugify(label)
            except ValueError:
                raise MalformedDocument(f"cannot derive a node id from label {label!r}", locus=locus) from None
        if node_id in nodes:
            raise DuplicateId(f"node id {node_id!r} declared twice in {doc_id!r}")
        try:
            kind = NodeKind(item.get("kind", NodeKind.ABILITY.value))
        except ValueError:
            raise MalformedDocument(f"unknown node kind {item.get('kind')!r}", locus=locus) from None
        nodes[node_id] = Node(id=node_id, label=label, kind=kind, provenance=((doc_id, label),))

    by_label = {}
    for node in nodes.values():
        by_label.setdefault(node.label, node.id)

    def resolve(reference: str, locus: str) -> str:
        if reference in nodes:
            return reference
        if reference in by_label:
            return by_label[reference]
        raise MissingEndpoint(f"{locus} references unknown node {reference!r}")

    # containment -> provenance notes on the contained side
    for index, item in enumerate(raw_nodes):
        for contained in item.get("contains", []) or []:
            child_id = resolve(str(contained), f"nodes[{index}].contains")
            child = nodes[child_id]
            note = (doc_id, f"contained in {item['label']}")
            if note not in child.provenance:
                nodes[child_id] = replace(child, provenance=child.provenance + (note,))

    edges: list[Edge] = []
    for index, link in enumerate(document.get("links", []) or []):
        locus = f"links[{index}]"
        if not isinstance(link, dict) or "from" not in link or "to" not in link:
            raise MalformedDocument("links need 'from' and 'to'", locus=locus)
        src = resolve(str(link["from"]), locus)
        dst = resolve(str(link["to"]), locus)
        try:
            kind = EdgeKind(link.get("kind", EdgeKind.FLOW.value))
        except ValueError:
            raise MalformedDocument(f"unknown edge kind {link.get('kind')!r}", locus=locus) from None
        edges.append(Edge(src=src, dst=dst, kind=kind, provenance=(doc_id,)))

    return AbilityGraph(
        id=doc_id,
        mode=GraphMode.RAW,
        nodes=tuple(nodes.values()),
        edges=tuple(edges),
        stage_label="imported",
    )


def import_edge_list(text: str, doc_id: str) -> AbilityGraph:
    """Import a curated edge list: one ``parent -> child`` per line.

    Bare label lines declare isolated nodes. Nodes are created on first
    mention, in file order.
    """
    nodes: dict[str, Node] = {}
    taken: set[str] = set()
    by_label: dict[str, str] = {}
    edges: list[Edge] = []

    def ensure(label: str) -> str:
        if label in by_label:
            return by_label[label]
        node_id = _fresh_id(label, taken)
        by_label[label] = node_id
        nodes[node_id] = Node(id=node_id, label=label, provenance=((doc_id, label),))
        return node_id

    meaningful = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        meaningful = True
        if "->" in line:
            left, _, right = line.partition("->")
            if not left.strip() or not right.strip():
                raise MalformedDocument(f"line {number}: expected 'parent -> child'")
            src = ensure(left.strip())
            dst = ensure(right.strip())
            edges.append(Edge(src=src, dst=dst, kind=EdgeKind.FLOW, provenance=(doc_id,)))
        else:
            ensure(line)
    if not meaningful:
        raise EmptyDocument(f"edge-list document {doc_id!r} has no content lines")

    return AbilityGraph(
        id=doc_id,
        mode=GraphMode.RAW,
        nodes=tuple(nodes.values()),
        edges=tuple(edges),
        stage_label="imported",
    )


# ---------------------------------------------------------------------------
# step 2: transformations


def rename_abilities(graph: AbilityGraph, rename_map: RenameMap) -> AbilityGraph:
    """Apply curated renames; ids stay, old labels go to provenance."""
    updates: dict[str, RenameEntry] = {}
    for entry in rename_map.entries:
        if not graph.has_node(entry.node_id):
            raise NodeNotFound(f"rename map targets unknown node {entry.node_id!r}")
        if not entry.new_label.strip():
            raise MalformedDocument(f"rename of {entry.node_id!r} has an empty label")
        updates[entry.node_id] = entry

    nodes = []
    for node in graph.nodes:
        entry = updates.get(node.id)
        if entry is None:
            nodes.append(node)
            continue
        provenance = node.provenance
        trace = (graph.id, node.label)
        if trace not in provenance:
            provenance = provenance + (trace,)
        nodes.append(
            replace(
                node,
                label=entry.new_label,
                ability_formulated=entry.ability_formulated,
                solution_neutral=entry.solution_neutral,
                provenance=provenance,
            )
        )
    return replace(graph, nodes=tuple(nodes))


def drop_non_solution_neutral(graph: AbilityGraph) -> AbilityGraph:
    """Remove every node marked solution-neutral=no, rewiring parents to children.

    For each removed node every former parent is connected to every former
    child so no downstream ability is lost; the bypass is noted on the new
    edges' provenance. Unreviewed nodes are left alone.
    """
    current = graph
    while True:
        doomed = sorted(
            n.id for n in current.nodes if n.solution_neutral is SolutionNeutral.NO
        )
        if not doomed:
            return current
        current = _remove_and_rewire(current, doomed[0])


def _remove_and_rewire(graph: AbilityGraph, node_id: str) -> AbilityGraph:
    incoming = [e for e in graph.edges if e.dst == node_id and e.src != node_id]
    outgoing = [e for e in graph.edges if e.src == node_id and e.dst != node_id]
    kept = [e for e in graph.edges if node_id not in (e.src, e.dst)]

    def bump(edges: list[Edge], new: Edge) -> None:
        # outside merged mode a duplicate (src, dst, kind) increments multiplicity
        if graph.mode is not GraphMode.MERGED:
            for i, existing in enumerate(edges):
                if existing.key == new.key:
                    provenance = list(existing.provenance)
                    for p in new.provenance:
                        if p not in provenance:
                            provenance.append(p)
                    edges[i] = replace(
                        existing,
                        multiplicity=existing.multiplicity + new.multiplicity,
                        provenance=tuple(provenance),
                    )
                    return
        edges.append(new)

    for up in incoming:
        for down in outgoing:
            if up.src == down.dst:
                continue  # never create a self-loop
            kind = (
                EdgeKind.QUALITY
                if EdgeKind.QUALITY in (up.kind, down.kind)
                else EdgeKind.FLOW
            )
            provenance = list(up.provenance)
            for p in down.provenance:
                if p not in provenance:
                    provenance.append(p)
            note = f"bypassed:{node_id}"
            if note not in provenance:
                provenance.append(note)
            bump(kept, Edge(src=up.src, dst=down.dst, kind=kind, provenance=tuple(provenance)))

    nodes = tuple(n for n in graph.nodes if n.id != node_id)
    return replace(graph, nodes=nodes, edges=tuple(kept))


def prune_information_flow_edges(
    graph: AbilityGraph, annotations: list[EdgeAnnotation] | tuple[EdgeAnnotation, ...]
) -> AbilityGraph:
    """Drop flow-only edges, re-kind the rest to quality dependencies.

    Every distinct (src, dst) pair of the graph must be annotated. The result
    advances to weakened mode.
    """
    classified: dict[tuple[str, str], EdgeClass] = {}
    for ann in annotations:
        pair = (ann.src, ann.dst)
        if not any(e.src == ann.src and e.dst == ann.dst for e in graph.edges):
            raise EdgeNotFound(f"annotation references unknown edge {ann.src}->{ann.dst}")
        classified[pair] = ann.classification

    uncovered = sorted({(e.src, e.dst) for e in graph.edges} - set(classified))
    if uncovered:
        listing = ", ".join(f"{a}->{b}" for a, b in uncovered)
        raise UnannotatedEdge(f"edges without annotation: {listing}", edges=uncovered)

    kept: list[Edge] = []
    index: dict[tuple[str, str], int] = {}
    for edge in graph.edges:
        if classified[(edge.src, edge.dst)] is EdgeClass.INFORMATION_FLOW_ONLY:
            continue
        pair = (edge.src, edge.dst)
        if pair in index:
            # dual-kind raw pairs collapse onto one quality edge
            i = index[pair]
            existing = kept[i]
            provenance = list(existing.provenance)
            for p in edge.provenance:
                if p not in provenance:
                    provenance.append(p)
            kept[i] = replace(
                existing,
                multiplicity=existing.multiplicity + edge.multiplicity,
                provenance=tuple(provenance),
            )
            continue
        index[pair] = len(kept)
        kept.append(replace(edge, kind=EdgeKind.QUALITY))

    return replace(graph, edges=tuple(kept), mode=GraphMode.WEAKENED)


def attach_terminals(graph: AbilityGraph, plan: TerminalPlan) -> AbilityGraph:
    """Attach planned data sources/sinks so every ability leaf gets a terminal.

    Terminals with the same label and kind are shared between leaves.
    """
    original_out_degree = {n.id: graph.out_degree(n.id) for n in graph.nodes}
    nodes = list(graph.nodes)
    edges = list(graph.edges)
    taken = {n.id for n in graph.nodes}
    existing: dict[tuple[NodeKind, str], str] = {
        (n.kind, n.label): n.id for n in graph.nodes if n.is_terminal
    }

    for attachment in plan.attachments:
        if not graph.has_node(attachment.leaf):
            raise NodeNotFound(f"terminal plan targets unknown node {attachment.leaf!r}")
        leaf = graph.node(attachment.leaf)
        if leaf.is_terminal:
            raise NotALeaf(f"{attachment.leaf!r} is a terminal, not an ability leaf")
        if original_out_degree[attachment.leaf] > 0:
            raise NotALeaf(f"{attachment.leaf!r} has sub-abilities and is not a leaf")
        if attachment.kind not in (NodeKind.DATA_SOURCE, NodeKind.DATA_SINK):
            raise MalformedDocument(f"terminal kind must be a data source or sink, got {attachment.kind}")
        key = (attachment.kind, attachment.label)
        terminal_id = existing.get(key)
        if terminal_id is None:
            terminal_id = _fresh_id(attachment.label, taken)
            existing[key] = terminal_id
            nodes.append(
                Node(
                    id=terminal_id,
                    label=attachment.label,
                    kind=attachment.kind,
                    solution_neutral=SolutionNeutral.YES,
                    ability_formulated=True,
                    provenance=((graph.id, attachment.label),),
                )
            )
        new_edge = Edge(src=attachment.leaf, dst=terminal_id, kind=EdgeKind.QUALITY, provenance=(graph.id,))
        for i, existing_edge in enumerate(edges):
            if existing_edge.key == new_edge.key:
                edges[i] = replace(existing_edge, multiplicity=existing_edge.multiplicity + 1)
                break
        else:
            edges.append(new_edge)

    result = replace(graph, nodes=tuple(nodes), edges=tuple(edges))
    bare = sorted(
        n.id
        for n in result.nodes
        if n.kind is NodeKind.ABILITY and result.out_degree(n.id) == 0
    )
    if bare:
        raise UncoveredLeaf(
            f"ability leaves without a planned terminal: {', '.join(bare)}", leaves=bare
        )
    return result


def collapse_single_child_chains(graph: AbilityGraph) -> AbilityGraph:
    """Fuse every ability whose only child is a sole-parent ability, to fixpoint.

    The fused node keeps the parent's id, concatenates the labels and unites
    provenance; a child with several parents is never fused so the result is
    independent of fusion order.
    """
    cycle = find_cycle(graph)
    if cycle:
        raise GraphCyclic(
            f"graph {graph.id!r} contains a cycle: {' -> '.join(cycle)}", cycle=cycle
        )

    current = graph
    while True:
        pair = _find_fusible_pair(current)
        if pair is None:
            return current
        current = _fuse(current, *pair)


def _find_fusible_pair(graph: AbilityGraph) -> tuple[str, str] | None:
    for node in sorted(graph.nodes, key=lambda n: n.id):
        if node.kind is not NodeKind.ABILITY:
            continue
        kids = graph.children(node.id)
        if len(kids) != 1:
            continue
        child = graph.node(kids[0])
        if child.kind is not NodeKind.ABILITY:
            continue
        if len(graph.parents(child.id)) != 1:
            continue
        return node.id, child.id
    return None


def _fuse(graph: AbilityGraph, parent_id: str, child_id: str) -> AbilityGraph:
    parent = graph.node(parent_id)
    child = graph.node(child_id)
    provenance = list(parent.provenance)
    for p in child.provenance:
        if p not in provenance:
            provenance.append(p)
    neutrality = SolutionNeutral.YES
    for value in (parent.solution_neutral, child.solution_neutral):
        if value is SolutionNeutral.NO:
            neutrality = SolutionNeutral.NO
            break
        if value is SolutionNeutral.UNREVIEWED:
            neutrality = SolutionNeutral.UNREVIEWED
    fused = Node(
        id=parent.id,
        label=f"{parent.label} – {child.label}",
        kind=NodeKind.ABILITY,
        solution_neutral=neutrality,
        ability_formulated=parent.ability_formulated and child.ability_formulated,
        provenance=tuple(provenance),
        cluster_tag=parent.cluster_tag or child.cluster_tag,
    )
    nodes = tuple(fused if n.id == parent_id else n for n in graph.nodes if n.id != child_id)
    edges = []
    for e in graph.edges:
        if e.src == parent_id and e.dst == child_id:
            continue
        if e.src == child_id:
            e = replace(e, src=parent_id)
        edges.append(e)
    return replace(graph, nodes=nodes, edges=tuple(edges))


def run_step2(
    graph: AbilityGraph,
    rename_map: RenameMap | None = None,
    annotations: list[EdgeAnnotation] | tuple[EdgeAnnotation, ...] = (),
    plan: TerminalPlan | None = None,
) -> AbilityGraph:
    """Run the fixed step-2 pipeline and label the result as transformed."""
    result = rename_abilities(graph, rename_map or RenameMap())
    result = drop_non_solution_neutral(result)
    result = prune_information_flow_edges(result, annotations)
    result = attach_terminals(result, plan or TerminalPlan())
    result = collapse_single_child_chains(result)
    return replace(result, stage_label="transformed")
