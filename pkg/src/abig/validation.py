"""Checks a graph against the strict or weakened ability-graph definition.

Validation is pure and total: it accepts arbitrarily malformed graphs and
reports every rule violation instead of raising. The strict rule set is a
superset of the weakened one, so anything passing strict also passes
weakened.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import AbilityGraph, EdgeKind, NodeKind, SolutionNeutral, find_cycle


class CheckMode(str, Enum):
    STRICT = "strict"
    WEAKENED = "weakened"


class Rule(str, Enum):
    SUB_ABILITY_COUNT = "SubAbilityCount"
    LEAF_NOT_TERMINAL = "LeafNotTerminal"
    NOT_SOLUTION_NEUTRAL = "NotSolutionNeutral"
    NOT_ABILITY_FORMULATED = "NotAbilityFormulated"
    CYCLE_PRESENT = "CyclePresent"
    INFORMATION_FLOW_EDGE = "InformationFlowEdge"
    ROOT_CARDINALITY = "RootCardinality"
    TERMINAL_HAS_CHILDREN = "TerminalHasChildren"


@dataclass(frozen=True)
class Violation:
    rule: Rule
    message: str
    node: str | None = None
    edge: tuple[str, str] | None = None


@dataclass(frozen=True)
class ValidationReport:
    graph_id: str
    mode_checked: CheckMode
    violations: tuple[Violation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def rules_hit(self) -> set[Rule]:
        return {v.rule for v in self.violations}


def validate(graph: AbilityGraph, mode: CheckMode | str) -> ValidationReport:
    mode = CheckMode(mode)
    violations: list[Violation] = []

    cycle = find_cycle(graph)
    if cycle:
        violations.append(
            Violation(Rule.CYCLE_PRESENT, f"directed cycle {' -> '.join(cycle)}")
        )

    if mode is CheckMode.STRICT:
        ability_roots = sorted(
            n.id
            for n in graph.ability_nodes()
            if not graph.parents(n.id)
        )
        if len(ability_roots) != 1:
            violations.append(
                Violation(
                    Rule.ROOT_CARDINALITY,
                    f"strict graphs need exactly one ability root, found {len(ability_roots)}"
                    f" ({', '.join(ability_roots) or 'none'})",
                )
            )

    for node in sorted(graph.nodes, key=lambda n: n.id):
        if node.kind is NodeKind.ABILITY:
            ability_child_count = len(graph.ability_children(node.id))
            if mode is CheckMode.STRICT and ability_child_count == 1:
                violations.append(
                    Violation(
                        Rule.SUB_ABILITY_COUNT,
                        f"ability {node.id!r} has exactly one sub-ability; strict graphs require none or at least two",
                        node=node.id,
                    )
                )
            if graph.out_degree(node.id) == 0 and not graph.is_view:
                violations.append(
                    Violation(
                        Rule.LEAF_NOT_TERMINAL,
                        f"ability {node.id!r} is a leaf; leaves must be data sinks or sources",
                        node=node.id,
                    )
                )
            if node.solution_neutral is not SolutionNeutral.YES:
                violations.append(
                    Violation(
                        Rule.NOT_SOLUTION_NEUTRAL,
                        f"ability {node.id!r} is marked solution-neutral={node.solution_neutral.value}",
                        node=node.id,
                    )
                )
            if not node.ability_formulated:
                violations.append(
                    Violation(
                        Rule.NOT_ABILITY_FORMULATED,
                        f"ability {node.id!r} has not been confirmed as formulated as an ability",
                        node=node.id,
                    )
                )
        else:
            if graph.out_degree(node.id) > 0:
                violations.append(
                    Violation(
                        Rule.TERMINAL_HAS_CHILDREN,
                        f"{node.kind.value} {node.id!r} must not have outgoing edges",
                        node=node.id,
                    )
                )

    seen_flow: set[tuple[str, str]] = set()
    for edge in graph.edges:
        if edge.kind is EdgeKind.FLOW and (edge.src, edge.dst) not in seen_flow:
            seen_flow.add((edge.src, edge.dst))
            violations.append(
                Violation(
                    Rule.INFORMATION_FLOW_EDGE,
                    f"information-flow edge {edge.src}->{edge.dst} is only allowed in raw graphs",
                    edge=(edge.src, edge.dst),
                )
            )

    return ValidationReport(graph_id=graph.id, mode_checked=mode, violations=tuple(violations))
