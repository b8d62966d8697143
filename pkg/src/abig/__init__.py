"""Ability-graph workbench for driving systems.

Builds, validates, merges, reduces and applies holistic ability graphs:
a graph engine plus CLI (``abig``) and HTTP service with a merge-review
workflow, coverage analysis and runtime monitoring.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    AbilityGraph,
    Edge,
    EdgeKind,
    GraphMode,
    GraphStats,
    Node,
    NodeKind,
    SolutionNeutral,
    add_edge,
    add_node,
    depth_of,
    stats,
    strip_terminals,
    truncate_depth,
)
from .validation import CheckMode, Rule, ValidationReport, Violation, validate  # noqa: F401
