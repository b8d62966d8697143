"""Step 3: identity candidates, the human decision ledger, and the merge fold.

Candidate generation mechanizes the cross-graph label comparison with a
character-trigram Jaccard similarity; identity itself always stays a human
decision recorded in the ledger. Applying the ledger conserves every edge of
every input graph ("the edges remain untouched"), so the merged edge multiset
size is exactly the sum of the inputs'.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    CycleIntroduced,
    DisjointnessViolated,
    NodeNotFound,
    TooFewGraphs,
    UnknownGraph,
)
from .model import (
    AbilityGraph,
    Edge,
    GraphMode,
    GraphStats,
    Node,
    NodeKind,
    SolutionNeutral,
    find_cycle,
    slugify,
    stats,
)

DEFAULT_THRESHOLD = 0.45

_NORMALIZE_RE = re.compile(r"[^a-z0-9]+")


def normalize_label(label: str) -> str:
    """Lowercase, collapse non-alphanumerics to single spaces, trim."""
    return _NORMALIZE_RE.sub(" ", label.lower()).strip()


def label_trigrams(label: str) -> frozenset[str]:
    """Set of character 3-grams of the normalized label, padded with one space."""
    padded = f" {normalize_label(label)} "
    return frozenset(padded[i : i + 3] for i in range(len(padded) - 2))


def trigram_similarity(a: str, b: str) -> float:
    """Jaccard index of the two labels' trigram sets."""
    ta, tb = label_trigrams(a), label_trigrams(b)
    union = ta | tb
    if not union:
        return 0.0
    return len(ta & tb) / len(union)


class CandidateStatus(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    REJECTED = "rejected"


@dataclass(frozen=True)
class CandidateMember:
    graph_id: str
    node_id: str
    label: str

    @property
    def key(self) -> tuple[str, str]:
        return (self.graph_id, self.node_id)


@dataclass(frozen=True)
class IdentityCandidate:
    candidate_id: str
    members: tuple[CandidateMember, ...]
    similarity: float
    status: CandidateStatus = CandidateStatus.PENDING
    canonical_label: str | None = None

    def default_canonical_label(self) -> str:
        longest = max(len(m.label) for m in self.members)
        return sorted(m.label for m in self.members if len(m.label) == longest)[0]


@dataclass(frozen=True)
class DecisionLedger:
    session_id: str
    base_graph: str
    others: tuple[str, ...] = ()
    candidates: tuple[IdentityCandidate, ...] = ()

    def candidate(self, candidate_id: str) -> IdentityCandidate:
        for c in self.candidates:
            if c.candidate_id == candidate_id:
                return c
        raise NodeNotFound(f"ledger has no candidate {candidate_id!r}")

    def approved(self) -> tuple[IdentityCandidate, ...]:
        return tuple(c for c in self.candidates if c.status is CandidateStatus.APPROVED)

    def pending(self) -> tuple[IdentityCandidate, ...]:
        return tuple(c for c in self.candidates if c.status is CandidateStatus.PENDING)

    def decide(
        self, candidate_id: str, approve: bool, canonical_label: str | None = None
    ) -> "DecisionLedger":
        """Record a verdict; approving without a label picks the longest member label."""
        target = self.candidate(candidate_id)
        if approve:
            label = canonical_label or target.default_canonical_label()
            decided = replace(target, status=CandidateStatus.APPROVED, canonical_label=label)
        else:
            decided = replace(target, status=CandidateStatus.REJECTED)
        return replace(
            self,
            candidates=tuple(decided if c.candidate_id == candidate_id else c for c in self.candidates),
        )


# ---------------------------------------------------------------------------
# candidate generation


def propose_identities(
    graphs: list[AbilityGraph] | tuple[AbilityGraph, ...], threshold: float = DEFAULT_THRESHOLD
) -> list[IdentityCandidate]:
    """Cross-graph ability pairs at or above the similarity threshold, grouped
    by transitive closure, sorted by similarity (then member order)."""
    if len(graphs) < 2:
        raise TooFewGraphs("candidate proposal needs at least two graphs")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be within [0, 1]")

    members: list[tuple[int, CandidateMember]] = []
    for gi, graph in enumerate(graphs):
        for node in sorted(graph.ability_nodes(), key=lambda n: n.id):
            members.append((gi, CandidateMember(graph.id, node.id, node.label)))

    trigrams = {m.key: label_trigrams(m.label) for _, m in members}
    parent: dict[tuple[str, str], tuple[str, str]] = {m.key: m.key for _, m in members}

    def find(key):
        while parent[key] != key:
            parent[key] = parent[parent[key]]
            key = parent[key]
        return key

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    pair_similarity: dict[tuple[str, str, str, str], float] = {}
    for i, (gi, a) in enumerate(members):
        for gj, b in members[i + 1 :]:
            if gi == gj:
                continue
            ta, tb = trigrams[a.key], trigrams[b.key]
            union_size = len(ta | tb)
            sim = len(ta & tb) / union_size if union_size else 0.0
            if sim >= threshold:
                union(a.key, b.key)
                pair_similarity[(*a.key, *b.key)] = sim

    groups: dict[tuple[str, str], list[CandidateMember]] = {}
    for _, m in members:
        groups.setdefault(find(m.key), []).append(m)

    raw: list[tuple[float, tuple[CandidateMember, ...]]] = []
    for root, group in groups.items():
        if len(group) < 2:
            continue
        group_sorted = tuple(sorted(group, key=lambda m: m.key))
        keys = {m.key for m in group_sorted}
        best = max(
            sim
            for (ga, na, gb, nb), sim in pair_similarity.items()
            if (ga, na) in keys and (gb, nb) in keys
        )
        raw.append((best, group_sorted))

    raw.sort(key=lambda item: (-item[0], [m.key for m in item[1]]))
    return [
        IdentityCandidate(candidate_id=f"c{i:03d}", members=group, similarity=sim)
        for i, (sim, group) in enumerate(raw, start=1)
    ]


# ---------------------------------------------------------------------------
# applying the ledger


def _check_disjoint(ledger: DecisionLedger) -> None:
    seen: dict[tuple[str, str], str] = {}
    for candidate in ledger.approved():
        for member in candidate.members:
            if member.key in seen:
                raise DisjointnessViolated(
                    f"node {member.graph_id}:{member.node_id} appears in approved candidates "
                    f"{seen[member.key]!r} and {candidate.candidate_id!r}"
                )
            seen[member.key] = candidate.candidate_id


class _MergeState:
    """Accumulator for the left fold: the graph under construction plus the
    mapping from (source graph, node) keys to merged node ids."""

    def __init__(self, merged_id: str):
        self.merged_id = merged_id
        self.nodes: dict[str, Node] = {}
        self.edges: list[Edge] = []
        self.key_map: dict[tuple[str, str], str] = {}
        self.terminal_ids: dict[tuple[NodeKind, str], str] = {}
        self.canonical_ids: dict[str, str] = {}  # candidate_id -> merged node id

    def fresh_id(self, base: str, fallback_prefix: str | None = None) -> str:
        if base not in self.nodes:
            return base
        if fallback_prefix:
            prefixed = f"{fallback_prefix}-{base}"
            if prefixed not in self.nodes:
                return prefixed
            base = prefixed
        n = 1
        candidate = base
        while candidate in self.nodes:
            n += 1
            candidate = f"{base}-{n}"
        return candidate

    def to_graph(self, stage_label: str) -> AbilityGraph:
        return AbilityGraph(
            id=self.merged_id,
            mode=GraphMode.MERGED,
            nodes=tuple(self.nodes.values()),
            edges=tuple(self.edges),
            stage_label=stage_label,
        )


def _union_provenance(base: tuple[tuple[str, str], ...], extra: tuple[tuple[str, str], ...]):
    out = list(base)
    for item in extra:
        if item not in out:
            out.append(item)
    return tuple(out)


def _fold_graph(state: _MergeState, graph: AbilityGraph, ledger: DecisionLedger) -> None:
    membership: dict[tuple[str, str], IdentityCandidate] = {}
    for candidate in ledger.approved():
        for member in candidate.members:
            membership[member.key] = candidate

    for node in graph.nodes:
        key = (graph.id, node.id)
        candidate = membership.get(key)
        if candidate is not None:
            node_id = state.canonical_ids.get(candidate.candidate_id)
            if node_id is None:
                label = candidate.canonical_label or candidate.default_canonical_label()
                node_id = state.fresh_id(slugify(label))
                state.canonical_ids[candidate.candidate_id] = node_id
                state.nodes[node_id] = Node(
                    id=node_id,
                    label=label,
                    kind=NodeKind.ABILITY,
                    solution_neutral=SolutionNeutral.YES,
                    ability_formulated=True,
                    provenance=node.provenance,
                )
            else:
                merged = state.nodes[node_id]
                state.nodes[node_id] = replace(
                    merged, provenance=_union_provenance(merged.provenance, node.provenance)
                )
            state.key_map[key] = node_id
            continue

        if node.is_terminal:
            terminal_key = (node.kind, normalize_label(node.label))
            node_id = state.terminal_ids.get(terminal_key)
            if node_id is None:
                node_id = state.fresh_id(node.id, graph.id)
                state.terminal_ids[terminal_key] = node_id
                state.nodes[node_id] = replace(node, id=node_id)
            else:
                merged = state.nodes[node_id]
                state.nodes[node_id] = replace(
                    merged, provenance=_union_provenance(merged.provenance, node.provenance)
                )
            state.key_map[key] = node_id
            continue

        node_id = state.fresh_id(node.id, graph.id)
        state.nodes[node_id] = replace(node, id=node_id)
        state.key_map[key] = node_id

    for edge in graph.edges:
        state.edges.append(
            replace(edge, src=state.key_map[(graph.id, edge.src)], dst=state.key_map[(graph.id, edge.dst)])
        )


def _check_acyclic(state: _MergeState, ledger: DecisionLedger, stage: str) -> AbilityGraph:
    graph = state.to_graph(stage)
    cycle = find_cycle(graph)
    if cycle is None:
        return graph
    on_cycle = set(cycle)
    culprit = None
    for candidate in ledger.approved():
        if state.canonical_ids.get(candidate.candidate_id) in on_cycle:
            culprit = candidate.candidate_id
            break
    raise CycleIntroduced(
        f"approved identification {culprit or '<unknown>'} closes the cycle {' -> '.join(cycle)}",
        cycle=cycle,
        candidate_id=culprit,
    )


def merged_graph_id(ledger: DecisionLedger) -> str:
    return f"{ledger.session_id}-merged"


def apply_ledger(base: AbilityGraph, other: AbilityGraph, ledger: DecisionLedger) -> AbilityGraph:
    """Merge ``other`` into ``base`` under the ledger's approved identities."""
    merged, _ = merge_all([base, other], ledger)
    return merged


def merge_all(
    graphs: list[AbilityGraph] | tuple[AbilityGraph, ...], ledger: DecisionLedger
) -> tuple[AbilityGraph, list[GraphStats]]:
    """Left fold of the merge over the ordered graphs; the first is the base.

    Returns the merged graph plus per-fold-step stats (the stage series).
    Every approved member must reference one of the provided graphs.
    """
    if len(graphs) < 2:
        raise TooFewGraphs("merging needs a base graph and at least one other")
    _check_disjoint(ledger)

    present = {g.id for g in graphs}
    if len(present) != len(graphs):
        raise UnknownGraph("merge inputs must have distinct graph ids")
    for candidate in ledger.approved():
        for member in candidate.members:
            if member.graph_id not in present:
                raise UnknownGraph(
                    f"candidate {candidate.candidate_id!r} references unknown graph {member.graph_id!r}"
                )
            graph = next(g for g in graphs if g.id == member.graph_id)
            if not graph.has_node(member.node_id):
                raise NodeNotFound(
                    f"candidate {candidate.candidate_id!r} references missing node "
                    f"{member.graph_id}:{member.node_id}"
                )

    state = _MergeState(merged_graph_id(ledger))
    stage_series: list[GraphStats] = []
    for index, graph in enumerate(graphs):
        _fold_graph(state, graph, ledger)
        merged = _check_acyclic(state, ledger, stage=f"merge-step-{index}")
        stage_series.append(stats(merged))
    final = replace(merged, stage_label="merged")
    return final, stage_series
