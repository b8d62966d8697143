"""Deterministic DOT export with depth-limited and terminal-free views."""

from __future__ import annotations

from .model import AbilityGraph, EdgeKind, NodeKind, strip_terminals, truncate_depth

_SHAPES = {
    NodeKind.ABILITY: "box",
    NodeKind.DATA_SOURCE: "ellipse",
    NodeKind.DATA_SINK: "diamond",
}


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    graph: AbilityGraph, depth_limit: int | None = None, show_terminals: bool = True
) -> str:
    """Render the graph (optionally truncated and terminal-free) as DOT text."""
    view = graph
    if not show_terminals:
        view = strip_terminals(view)
    if depth_limit is not None:
        view = truncate_depth(view, depth_limit)

    lines = [f"digraph {_quote(view.id)} {{", "  rankdir=TB;"]
    for node in sorted(view.nodes, key=lambda n: n.id):
        lines.append(
            f"  {_quote(node.id)} [label={_quote(node.label)}, shape={_SHAPES[node.kind]}];"
        )
    for edge in sorted(view.edges, key=lambda e: (e.src, e.dst, e.kind.value)):
        attrs = []
        if edge.multiplicity > 1:
            attrs.append(f"label={_quote(str(edge.multiplicity))}")
        if edge.kind is EdgeKind.FLOW:
            attrs.append("style=dashed")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(edge.src)} -> {_quote(edge.dst)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"
