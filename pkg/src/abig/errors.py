"""Domain error hierarchy.

Every error carries a stable ``code`` (used by the CLI error records and
the HTTP service) and a human-readable message. Extra context such as the
offending cycle or the uncovered edge list rides along as attributes.
"""

from __future__ import annotations


class AbilityGraphError(Exception):
    """Base class for all domain errors."""

    code = "AbilityGraphError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DuplicateId(AbilityGraphError):
    code = "DuplicateId"


class NodeNotFound(AbilityGraphError):
    code = "NodeNotFound"


class EdgeNotFound(AbilityGraphError):
    code = "EdgeNotFound"


class MissingEndpoint(AbilityGraphError):
    code = "MissingEndpoint"


class CycleIntroduced(AbilityGraphError):
    """Raised when an edit would close a directed cycle.

    ``cycle`` is the offending node sequence, first node repeated at the
    end (e.g. ``["a", "b", "c", "a"]``).
    """

    code = "CycleIntroduced"

    def __init__(self, message: str, cycle: list[str] | None = None, candidate_id: str | None = None):
        super().__init__(message)
        self.cycle = cycle or []
        self.candidate_id = candidate_id


class GraphCyclic(AbilityGraphError):
    code = "GraphCyclic"

    def __init__(self, message: str, cycle: list[str] | None = None):
        super().__init__(message)
        self.cycle = cycle or []


class InformationFlowForbidden(AbilityGraphError):
    code = "InformationFlowForbidden"


class InconsistentIndentation(AbilityGraphError):
    code = "InconsistentIndentation"

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class MultipleRoots(AbilityGraphError):
    code = "MultipleRoots"


class EmptyDocument(AbilityGraphError):
    code = "EmptyDocument"


class MalformedDocument(AbilityGraphError):
    code = "MalformedDocument"

    def __init__(self, message: str, locus: str | None = None):
        if locus:
            message = f"{locus}: {message}"
        super().__init__(message)
        self.locus = locus


class UnsupportedVersion(AbilityGraphError):
    code = "UnsupportedVersion"


class UnannotatedEdge(AbilityGraphError):
    code = "UnannotatedEdge"

    def __init__(self, message: str, edges: list[tuple[str, str]] | None = None):
        super().__init__(message)
        self.edges = edges or []


class UncoveredLeaf(AbilityGraphError):
    code = "UncoveredLeaf"

    def __init__(self, message: str, leaves: list[str] | None = None):
        super().__init__(message)
        self.leaves = leaves or []


class NotALeaf(AbilityGraphError):
    code = "NotALeaf"


class TooFewGraphs(AbilityGraphError):
    code = "TooFewGraphs"


class UnknownGraph(AbilityGraphError):
    code = "UnknownGraph"


class DisjointnessViolated(AbilityGraphError):
    code = "DisjointnessViolated"


class ClusterOverlap(AbilityGraphError):
    code = "ClusterOverlap"


class InvalidCluster(AbilityGraphError):
    code = "InvalidCluster"


class UnknownAbility(AbilityGraphError):
    code = "UnknownAbility"


class DuplicateModule(AbilityGraphError):
    code = "DuplicateModule"


class UnknownModule(AbilityGraphError):
    code = "UnknownModule"


class MissingModuleStatus(AbilityGraphError):
    code = "MissingModuleStatus"


class IncompleteCoverage(AbilityGraphError):
    code = "IncompleteCoverage"

    def __init__(self, message: str, uncovered: list[str] | None = None):
        super().__init__(message)
        self.uncovered = uncovered or []


class ScoreOutOfRange(AbilityGraphError):
    code = "ScoreOutOfRange"
