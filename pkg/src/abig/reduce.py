"""Step 4: contract similar-but-not-identical abilities and deduplicate edges.

Cluster specs are curated input, like the identity ledger. Contraction keeps
the original relations: two surviving nodes are connected afterwards exactly
when some pre-images were connected before (self-loops produced by the
contraction are dropped and noted in provenance).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ClusterOverlap, CycleIntroduced, InvalidCluster, NodeNotFound
from .model import (
    AbilityGraph,
    Edge,
    Node,
    NodeKind,
    SolutionNeutral,
    find_cycle,
    slugify,
)


@dataclass(frozen=True)
class Cluster:
    label: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class ClusterSpec:
    clusters: tuple[Cluster, ...] = ()


def cluster_nodes(graph: AbilityGraph, spec: ClusterSpec) -> AbilityGraph:
    """Contract each cluster's members into one ability node.

    Single-member clusters are pure renames and keep the member's id;
    multi-member clusters form a new node named after the cluster label.
    """
    seen: dict[str, str] = {}
    for cluster in spec.clusters:
        if not cluster.members:
            raise InvalidCluster(f"cluster {cluster.label!r} has no members")
        if not cluster.label.strip():
            raise InvalidCluster("clusters need a non-empty label")
        for member in cluster.members:
            if not graph.has_node(member):
                raise NodeNotFound(f"cluster {cluster.label!r} references unknown node {member!r}")
            if graph.node(member).kind is not NodeKind.ABILITY:
                raise InvalidCluster(
                    f"cluster {cluster.label!r} references {member!r}, which is not an ability"
                )
            if member in seen:
                raise ClusterOverlap(
                    f"node {member!r} appears in clusters {seen[member]!r} and {cluster.label!r}"
                )
            seen[member] = cluster.label

    surviving = {n.id for n in graph.nodes} - set(seen)
    mapping: dict[str, str] = {n.id: n.id for n in graph.nodes}
    cluster_ids: dict[str, str] = {}
    for cluster in spec.clusters:
        if len(cluster.members) == 1:
            cluster_id = cluster.members[0]
        else:
            base = slugify(cluster.label)
            cluster_id = base
            n = 1
            while cluster_id in surviving:
                n += 1
                cluster_id = f"{base}-{n}"
            surviving.add(cluster_id)
        cluster_ids[cluster.label] = cluster_id
        for member in cluster.members:
            mapping[member] = cluster_id

    dropped_loops: dict[str, list[str]] = {}
    edges = []
    for edge in graph.edges:
        src, dst = mapping[edge.src], mapping[edge.dst]
        if src == dst:
            dropped_loops.setdefault(src, []).append(f"{edge.src}->{edge.dst}")
            continue
        edges.append(replace(edge, src=src, dst=dst))

    nodes: list[Node] = []
    emitted: set[str] = set()
    for node in graph.nodes:
        target = mapping[node.id]
        if target == node.id and node.id not in seen:
            nodes.append(node)
            continue
        if target in emitted:
            continue
        emitted.add(target)
        cluster = next(c for c in spec.clusters if seen[node.id] == c.label)
        members = [graph.node(m) for m in cluster.members]
        provenance: list[tuple[str, str]] = []
        for m in members:
            for p in m.provenance:
                if p not in provenance:
                    provenance.append(p)
        for loop in dropped_loops.get(target, []):
            note = (graph.id, f"dropped self-loop {loop}")
            if note not in provenance:
                provenance.append(note)
        neutrality = SolutionNeutral.YES
        for m in members:
            if m.solution_neutral is SolutionNeutral.NO:
                neutrality = SolutionNeutral.NO
                break
            if m.solution_neutral is SolutionNeutral.UNREVIEWED:
                neutrality = SolutionNeutral.UNREVIEWED
        nodes.append(
            Node(
                id=target,
                label=cluster.label,
                kind=NodeKind.ABILITY,
                solution_neutral=neutrality,
                ability_formulated=all(m.ability_formulated for m in members),
                provenance=tuple(provenance),
                cluster_tag=cluster.label,
            )
        )

    result = replace(graph, nodes=tuple(nodes), edges=tuple(edges))
    cycle = find_cycle(result)
    if cycle:
        on_cycle = set(cycle)
        culprit = next(
            (label for label, cid in cluster_ids.items() if cid in on_cycle), None
        )
        raise CycleIntroduced(
            f"contracting cluster {culprit or '<unknown>'!r} closes the cycle {' -> '.join(cycle)}",
            cycle=cycle,
        )
    return result


def dedupe_edges(graph: AbilityGraph) -> AbilityGraph:
    """Collapse parallel (src, dst, kind) entries into one edge.

    Multiplicities add up and provenance is united, so the total multiplicity
    sum and the distinct key set are both preserved.
    """
    deduped: dict[tuple[str, str, str], Edge] = {}
    for edge in graph.edges:
        key = (edge.src, edge.dst, edge.kind.value)
        existing = deduped.get(key)
        if existing is None:
            deduped[key] = edge
            continue
        provenance = list(existing.provenance)
        for p in edge.provenance:
            if p not in provenance:
                provenance.append(p)
        deduped[key] = replace(
            existing,
            multiplicity=existing.multiplicity + edge.multiplicity,
            provenance=tuple(provenance),
        )
    return replace(graph, edges=tuple(deduped.values()))
