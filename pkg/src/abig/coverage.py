"""Module-to-ability mappings, coverage analysis and runtime monitoring.

An ability counts as covered when a module maps to it directly or when all of
its sub-abilities are covered. Monitoring presupposes complete coverage and
propagates module states bottom-up through the quality dependencies: binary
availability as a conjunction, scores through a min (default) or mean policy.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import (
    DuplicateModule,
    IncompleteCoverage,
    MissingModuleStatus,
    ScoreOutOfRange,
    UnknownAbility,
    UnknownModule,
)
from .model import AbilityGraph, NodeKind, topological_order


class ModuleStatus(str, Enum):
    UP = "up"
    DOWN = "down"


class Availability(str, Enum):
    AVAILABLE = "available"
    UNAVAILABLE = "unavailable"


class ScorePolicy(str, Enum):
    MIN = "min"
    MEAN = "mean"


@dataclass(frozen=True)
class ModuleBinding:
    module: str
    abilities: tuple[str, ...]


@dataclass(frozen=True)
class CoverageMapping:
    mapping_id: str
    entries: tuple[ModuleBinding, ...] = ()

    def modules(self) -> tuple[str, ...]:
        return tuple(e.module for e in self.entries)


@dataclass(frozen=True)
class CoverageReport:
    graph_id: str
    mapping_id: str
    covered: frozenset[str]
    uncovered: frozenset[str]
    unmapped_modules: frozenset[str]

    @property
    def complete(self) -> bool:
        return not self.uncovered


@dataclass(frozen=True)
class MonitorState:
    module_status: dict[str, object]
    ability_state: dict[str, object]
    policy: ScorePolicy = ScorePolicy.MIN


def _check_mapping(graph: AbilityGraph, mapping: CoverageMapping) -> dict[str, list[str]]:
    """Validate the mapping and return ability id -> modules mapped to it."""
    seen_modules: set[str] = set()
    direct: dict[str, list[str]] = {}
    for binding in mapping.entries:
        if binding.module in seen_modules:
            raise DuplicateModule(f"module {binding.module!r} is mapped twice")
        seen_modules.add(binding.module)
        for ability in binding.abilities:
            if not graph.has_node(ability):
                raise UnknownAbility(
                    f"module {binding.module!r} maps to unknown ability {ability!r}"
                )
            if graph.node(ability).kind is not NodeKind.ABILITY:
                raise UnknownAbility(
                    f"module {binding.module!r} maps to {ability!r}, which is not an ability"
                )
            direct.setdefault(ability, []).append(binding.module)
    return direct


def coverage_report(graph: AbilityGraph, mapping: CoverageMapping) -> CoverageReport:
    direct = _check_mapping(graph, mapping)
    covered: set[str] = set()
    for node_id in reversed(topological_order(graph)):
        node = graph.node(node_id)
        if node.kind is not NodeKind.ABILITY:
            continue
        if node_id in direct:
            covered.add(node_id)
            continue
        kids = graph.ability_children(node_id)
        if kids and all(k in covered for k in kids):
            covered.add(node_id)
    abilities = {n.id for n in graph.ability_nodes()}
    unmapped = frozenset(e.module for e in mapping.entries if not e.abilities)
    return CoverageReport(
        graph_id=graph.id,
        mapping_id=mapping.mapping_id,
        covered=frozenset(covered),
        uncovered=frozenset(abilities - covered),
        unmapped_modules=unmapped,
    )


def _require_complete(graph: AbilityGraph, mapping: CoverageMapping) -> dict[str, list[str]]:
    report = coverage_report(graph, mapping)
    if not report.complete:
        missing = sorted(report.uncovered)
        raise IncompleteCoverage(
            f"monitoring requires complete coverage; uncovered: {', '.join(missing)}",
            uncovered=missing,
        )
    return _check_mapping(graph, mapping)


def _check_module_values(mapping: CoverageMapping, values: Mapping[str, object]) -> None:
    known = set(mapping.modules())
    for name in values:
        if name not in known:
            raise UnknownModule(f"status for unknown module {name!r}")
    needed = {e.module for e in mapping.entries if e.abilities}
    missing = sorted(needed - set(values))
    if missing:
        raise MissingModuleStatus(f"no status for mapped modules: {', '.join(missing)}")


def evaluate_binary(
    graph: AbilityGraph, mapping: CoverageMapping, status: Mapping[str, ModuleStatus | str]
) -> MonitorState:
    """Availability per ability: all mapped modules up and all sub-abilities available."""
    direct = _require_complete(graph, mapping)
    states = {name: ModuleStatus(value) for name, value in status.items()}
    _check_module_values(mapping, states)

    availability: dict[str, Availability] = {}
    for node_id in reversed(topological_order(graph)):
        node = graph.node(node_id)
        if node.kind is not NodeKind.ABILITY:
            continue
        modules_ok = all(states[m] is ModuleStatus.UP for m in direct.get(node_id, []))
        children_ok = all(
            availability[c] is Availability.AVAILABLE for c in graph.ability_children(node_id)
        )
        availability[node_id] = (
            Availability.AVAILABLE if modules_ok and children_ok else Availability.UNAVAILABLE
        )
    return MonitorState(module_status=dict(states), ability_state=availability)


def evaluate_scores(
    graph: AbilityGraph,
    mapping: CoverageMapping,
    scores: Mapping[str, float],
    policy: ScorePolicy | str = ScorePolicy.MIN,
) -> MonitorState:
    """Continuous performance per ability, aggregated over module scores and
    sub-ability scores with the chosen policy."""
    policy = ScorePolicy(policy)
    direct = _require_complete(graph, mapping)
    for name, value in scores.items():
        if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
            raise ScoreOutOfRange(f"score for module {name!r} must be within [0, 1], got {value!r}")
    values = {name: float(value) for name, value in scores.items()}
    _check_module_values(mapping, values)

    ability_scores: dict[str, float] = {}
    for node_id in reversed(topological_order(graph)):
        node = graph.node(node_id)
        if node.kind is not NodeKind.ABILITY:
            continue
        pool = [values[m] for m in direct.get(node_id, [])]
        pool.extend(ability_scores[c] for c in graph.ability_children(node_id))
        if policy is ScorePolicy.MIN:
            ability_scores[node_id] = min(pool)
        else:
            ability_scores[node_id] = sum(pool) / len(pool)
    return MonitorState(module_status=dict(values), ability_state=ability_scores, policy=policy)


# ---------------------------------------------------------------------------
# event replay


@dataclass(frozen=True)
class MonitorEvent:
    at: str
    module: str
    status: ModuleStatus | None = None
    score: float | None = None


@dataclass(frozen=True)
class TimelineEntry:
    at: str
    module: str
    value: object
    ability_state: dict[str, object]


def simulate(
    graph: AbilityGraph,
    mapping: CoverageMapping,
    events: list[MonitorEvent] | tuple[MonitorEvent, ...],
    policy: ScorePolicy | str = ScorePolicy.MIN,
) -> list[TimelineEntry]:
    """Replay timestamped status changes; every module starts up.

    Binary events keep binary semantics unless any event carries a score, in
    which case up/down coerce to 1.0/0.0 and the score policy applies.
    """
    policy = ScorePolicy(policy)
    _require_complete(graph, mapping)
    score_mode = any(e.score is not None for e in events)

    timeline: list[TimelineEntry] = []
    if score_mode:
        values: dict[str, float] = {m: 1.0 for m in mapping.modules()}
        for event in events:
            if event.score is not None:
                values[event.module] = event.score
            elif event.status is not None:
                values[event.module] = 1.0 if event.status is ModuleStatus.UP else 0.0
            else:
                raise MissingModuleStatus(f"event at {event.at} carries neither status nor score")
            state = evaluate_scores(graph, mapping, values, policy)
            timeline.append(
                TimelineEntry(
                    at=event.at,
                    module=event.module,
                    value=values[event.module],
                    ability_state=dict(state.ability_state),
                )
            )
    else:
        status: dict[str, ModuleStatus] = {m: ModuleStatus.UP for m in mapping.modules()}
        for event in events:
            if event.status is None:
                raise MissingModuleStatus(f"event at {event.at} carries neither status nor score")
            status[event.module] = event.status
            state = evaluate_binary(graph, mapping, status)
            timeline.append(
                TimelineEntry(
                    at=event.at,
                    module=event.module,
                    value=event.status.value,
                    ability_state=dict(state.ability_state),
                )
            )
    return timeline
