"""The bundled holistic sample graph.

Extends the reduced corpus shape with the perception and vehicle-operation
detail the application fixtures need: road-surface, weather, traffic-sign and
acoustic perception, event-based monitoring, prediction, traffic rules,
reverse gear, conspicuity and wiper control.
"""

from __future__ import annotations

from ..model import (
    AbilityGraph,
    Edge,
    GraphMode,
    Node,
    NodeKind,
    SolutionNeutral,
)

_ABILITIES = {
    "performing-the-driving-task": "performing the driving task",
    "perception": "perception",
    "environmental-perception": "environmental perception",
    "event-based-monitoring": "event-based monitoring",
    "localization": "localization",
    "perceiving-the-road-surface-state": "perceiving the road surface state",
    "perceiving-the-weather": "perceiving the weather",
    "perceiving-traffic-signs": "perceiving traffic signs",
    "perceiving-acoustic-information": "perceiving acoustic information",
    "detecting-and-classifying-objects": "detecting and classifying objects",
    "predicting-object-behavior": "predicting object behavior",
    "planning-and-decision-making": "planning and decision making",
    "planning-the-mission": "planning the mission",
    "planning-the-behavior": "planning the behavior",
    "obeying-traffic-rules": "obeying traffic rules",
    "guidance-of-the-vehicle": "guidance of the vehicle",
    "controlling-vehicle-motion": "controlling vehicle motion",
    "controlling-lateral-vehicle-motion": "controlling lateral vehicle motion",
    "controlling-longitudinal-vehicle-motion": "controlling longitudinal vehicle motion",
    "stabilizing-the-vehicle": "stabilizing the vehicle",
    "vehicle-operation": "vehicle operation",
    "selecting-the-reverse-gear": "selecting the reverse gear",
    "communicating-with-the-environment": "communicating with the environment",
    "performing-secondary-driving-tasks": "performing secondary driving tasks",
    "enhancing-conspicuity": "enhancing conspicuity",
    "controlling-the-windscreen-wiper": "controlling the windscreen wiper",
    "performing-the-vehicle-task": "performing the vehicle task",
    "cooperating-with-other-vehicles": "cooperating with other vehicles",
}

_TERMINALS = {
    "information-from-sensors": ("information from sensors", NodeKind.DATA_SOURCE),
    "navigation-data": ("navigation data", NodeKind.DATA_SOURCE),
    "traffic-rules-knowledge": ("traffic rules knowledge", NodeKind.DATA_SOURCE),
    "vehicle-actuation": ("vehicle actuation", NodeKind.DATA_SINK),
    "communication-signals": ("communication signals", NodeKind.DATA_SINK),
}

_EDGES = [
    ("performing-the-driving-task", "perception"),
    ("performing-the-driving-task", "planning-and-decision-making"),
    ("performing-the-driving-task", "guidance-of-the-vehicle"),
    ("performing-the-driving-task", "vehicle-operation"),
    ("performing-the-driving-task", "performing-the-vehicle-task"),
    ("performing-the-driving-task", "cooperating-with-other-vehicles"),
    ("perception", "environmental-perception"),
    ("perception", "localization"),
    ("perception", "perceiving-the-road-surface-state"),
    ("perception", "perceiving-the-weather"),
    ("perception", "perceiving-traffic-signs"),
    ("perception", "perceiving-acoustic-information"),
    ("perception", "detecting-and-classifying-objects"),
    ("perception", "predicting-object-behavior"),
    ("environmental-perception", "event-based-monitoring"),
    ("event-based-monitoring", "information-from-sensors"),
    ("localization", "information-from-sensors"),
    ("localization", "navigation-data"),
    ("perceiving-the-road-surface-state", "information-from-sensors"),
    ("perceiving-the-weather", "information-from-sensors"),
    ("perceiving-traffic-signs", "information-from-sensors"),
    ("perceiving-acoustic-information", "information-from-sensors"),
    ("detecting-and-classifying-objects", "information-from-sensors"),
    ("predicting-object-behavior", "detecting-and-classifying-objects"),
    ("planning-and-decision-making", "planning-the-mission"),
    ("planning-and-decision-making", "planning-the-behavior"),
    ("planning-and-decision-making", "obeying-traffic-rules"),
    ("planning-the-mission", "navigation-data"),
    ("planning-the-behavior", "predicting-object-behavior"),
    ("obeying-traffic-rules", "traffic-rules-knowledge"),
    ("guidance-of-the-vehicle", "controlling-vehicle-motion"),
    ("guidance-of-the-vehicle", "stabilizing-the-vehicle"),
    ("controlling-vehicle-motion", "controlling-lateral-vehicle-motion"),
    ("controlling-vehicle-motion", "controlling-longitudinal-vehicle-motion"),
    ("controlling-lateral-vehicle-motion", "vehicle-actuation"),
    ("controlling-longitudinal-vehicle-motion", "vehicle-actuation"),
    ("stabilizing-the-vehicle", "vehicle-actuation"),
    ("vehicle-operation", "selecting-the-reverse-gear"),
    ("vehicle-operation", "communicating-with-the-environment"),
    ("vehicle-operation", "performing-secondary-driving-tasks"),
    ("selecting-the-reverse-gear", "vehicle-actuation"),
    ("communicating-with-the-environment", "communication-signals"),
    ("performing-secondary-driving-tasks", "enhancing-conspicuity"),
    ("performing-secondary-driving-tasks", "controlling-the-windscreen-wiper"),
    ("enhancing-conspicuity", "communication-signals"),
    ("controlling-the-windscreen-wiper", "vehicle-actuation"),
    ("performing-the-vehicle-task", "navigation-data"),
    ("cooperating-with-other-vehicles", "communication-signals"),
]


def holistic_sample() -> AbilityGraph:
    nodes = [
        Node(
            id=node_id,
            label=label,
            kind=NodeKind.ABILITY,
            solution_neutral=SolutionNeutral.YES,
            ability_formulated=True,
            provenance=(("holistic-sample", label),),
        )
        for node_id, label in _ABILITIES.items()
    ]
    nodes += [
        Node(
            id=node_id,
            label=label,
            kind=kind,
            solution_neutral=SolutionNeutral.YES,
            ability_formulated=True,
            provenance=(("holistic-sample", label),),
        )
        for node_id, (label, kind) in _TERMINALS.items()
    ]
    edges = [Edge(src=src, dst=dst, provenance=("holistic-sample",)) for src, dst in _EDGES]
    return AbilityGraph(
        id="holistic-sample",
        mode=GraphMode.MERGED,
        nodes=tuple(nodes),
        edges=tuple(edges),
        stage_label="holistic-sample",
    )
