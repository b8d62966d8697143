"""The ``abig`` command line: import, transform, merge, reduce, analyze, serve.

Exit codes: 0 on success, 1 on domain errors, 2 on usage errors. Errors are
written to stderr as single-line JSON records ``{"error": code, "message": m}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import corpus as corpus_module
from .coverage import ScorePolicy, coverage_report, simulate
from .dot import export_dot
from .errors import AbilityGraphError, MalformedDocument
from .merge import DEFAULT_THRESHOLD, merge_all, propose_identities
from .model import GraphStats, stats
from .reduce import cluster_nodes, dedupe_edges
from .serialization import (
    canonical_json,
    ledger_to_document,
    load_annotations,
    load_cluster_spec,
    load_coverage_mapping,
    load_graph,
    load_ledger,
    load_monitor_events,
    load_rename_map,
    load_terminal_plan,
    save_graph,
    stats_to_csv,
)
from .merge import DecisionLedger
from .transform import import_edge_list, import_hierarchy, import_node_link, run_step2
from .validation import validate


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line machine-parseable usage errors
        raise UsageError(message)


def _emit_error(code: str, message: str) -> None:
    record = json.dumps({"error": code, "message": message}, ensure_ascii=False)
    print(record, file=sys.stderr)


def _read_graph(path: str):
    return load_graph(Path(path).read_bytes())


def _write_output(data: bytes | str, output: str | None) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if output:
        Path(output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="abig", description="ability-graph workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("import", help="import a source description as a raw graph")
    p.add_argument("--format", required=True, choices=["outline", "nodelink", "edgelist"])
    p.add_argument("--id", required=True, dest="graph_id")
    p.add_argument("file")
    p.add_argument("-o", "--output")

    p = sub.add_parser("validate", help="check a graph against the ability-graph rules")
    p.add_argument("--mode", required=True, choices=["strict", "weakened"])
    p.add_argument("graph")

    p = sub.add_parser("transform", help="run the step-2 pipeline on a raw graph")
    p.add_argument("--rename")
    p.add_argument("--annotations")
    p.add_argument("--terminals")
    p.add_argument("graph")
    p.add_argument("-o", "--output")

    p = sub.add_parser("merge", help="identity proposal and ledger application")
    merge_sub = p.add_subparsers(dest="merge_command", required=True)

    mp = merge_sub.add_parser("propose", help="propose identity candidates")
    mp.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    mp.add_argument("--session-id", default="review")
    mp.add_argument("graphs", nargs="+")
    mp.add_argument("-o", "--output")

    ma = merge_sub.add_parser("apply", help="fold graphs under a decision ledger")
    ma.add_argument("--ledger", required=True)
    ma.add_argument("--stats-out", help="write per-step stage stats as CSV")
    ma.add_argument("base")
    ma.add_argument("others", nargs="+")
    ma.add_argument("-o", "--output")

    p = sub.add_parser("reduce", help="contract clusters and deduplicate edges")
    p.add_argument("--clusters")
    p.add_argument("--dedupe", action="store_true")
    p.add_argument("graph")
    p.add_argument("-o", "--output")

    p = sub.add_parser("stats", help="stage table (CSV) for one or more graphs")
    p.add_argument("graphs", nargs="+")
    p.add_argument("-o", "--output")

    p = sub.add_parser("coverage", help="module coverage report for a graph")
    p.add_argument("--mapping", required=True)
    p.add_argument("graph")
    p.add_argument("-o", "--output")

    p = sub.add_parser("monitor", help="runtime monitoring")
    monitor_sub = p.add_subparsers(dest="monitor_command", required=True)
    ms = monitor_sub.add_parser("simulate", help="replay a status event file")
    ms.add_argument("--mapping", required=True)
    ms.add_argument("--events", required=True)
    ms.add_argument("--policy", choices=["min", "mean"], default="min")
    ms.add_argument("graph")
    ms.add_argument("-o", "--output")

    p = sub.add_parser("export", help="export a graph")
    p.add_argument("--dot", action="store_true", required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--no-terminals", action="store_true")
    p.add_argument("graph")
    p.add_argument("-o", "--output")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--workspace", required=True)
    p.add_argument("--ui", help="directory with built web assets to serve at /ui")
    p.add_argument("--seed-demo", action="store_true",
                   help="seed the workspace with the bundled corpus if empty")

    return parser


def _cmd_import(args) -> int:
    raw = Path(args.file).read_bytes()
    if args.format == "outline":
        graph = import_hierarchy(raw.decode("utf-8"), args.graph_id)
    elif args.format == "edgelist":
        graph = import_edge_list(raw.decode("utf-8"), args.graph_id)
    else:
        try:
            document = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid JSON: {exc}") from None
        graph = import_node_link(document, args.graph_id)
    _write_output(save_graph(graph), args.output)
    return 0


def _cmd_validate(args) -> int:
    graph = _read_graph(args.graph)
    report = validate(graph, args.mode)
    document = {
        "graph_id": report.graph_id,
        "mode_checked": report.mode_checked.value,
        "passed": report.passed,
        "violations": [
            {
                "rule": v.rule.value,
                "message": v.message,
                "node": v.node,
                "edge": list(v.edge) if v.edge else None,
            }
            for v in report.violations
        ],
    }
    _write_output(canonical_json(document), None)
    return 0


def _cmd_transform(args) -> int:
    graph = _read_graph(args.graph)
    rename_map = load_rename_map(Path(args.rename).read_bytes()) if args.rename else None
    annotations = load_annotations(Path(args.annotations).read_bytes()) if args.annotations else ()
    plan = load_terminal_plan(Path(args.terminals).read_bytes()) if args.terminals else None
    result = run_step2(graph, rename_map=rename_map, annotations=annotations, plan=plan)
    _write_output(save_graph(result), args.output)
    return 0


def _cmd_merge_propose(args) -> int:
    graphs = [_read_graph(p) for p in args.graphs]
    candidates = propose_identities(graphs, threshold=args.threshold)
    ledger = DecisionLedger(
        session_id=args.session_id,
        base_graph=graphs[0].id,
        others=tuple(g.id for g in graphs[1:]),
        candidates=tuple(candidates),
    )
    _write_output(canonical_json(ledger_to_document(ledger)), args.output)
    return 0


def _cmd_merge_apply(args) -> int:
    ledger = load_ledger(Path(args.ledger).read_bytes())
    graphs = [_read_graph(args.base)] + [_read_graph(p) for p in args.others]
    merged, steps = merge_all(graphs, ledger)
    if args.stats_out:
        Path(args.stats_out).write_text(stats_to_csv(steps), encoding="utf-8")
    _write_output(save_graph(merged), args.output)
    return 0


def _cmd_reduce(args) -> int:
    graph = _read_graph(args.graph)
    if args.clusters:
        spec = load_cluster_spec(Path(args.clusters).read_bytes())
        graph = cluster_nodes(graph, spec)
    if args.dedupe:
        graph = dedupe_edges(graph)
    graph = replace(graph, stage_label="reduced")
    _write_output(save_graph(graph), args.output)
    return 0


def _cmd_stats(args) -> int:
    rows: list[GraphStats] = []
    totals: dict[str, GraphStats] = {}
    order: list[str] = []
    for path in args.graphs:
        graph = _read_graph(path)
        row = stats(graph)
        if row.stage_label not in totals:
            order.append(row.stage_label)
            totals[row.stage_label] = row
        else:
            seen = totals[row.stage_label]
            totals[row.stage_label] = GraphStats(
                stage_label=row.stage_label,
                node_count=seen.node_count + row.node_count,
                edge_count=seen.edge_count + row.edge_count,
                distinct_edge_count=seen.distinct_edge_count + row.distinct_edge_count,
            )
    rows = [totals[label] for label in order]
    _write_output(stats_to_csv(rows), args.output)
    return 0


def _cmd_coverage(args) -> int:
    graph = _read_graph(args.graph)
    mapping = load_coverage_mapping(Path(args.mapping).read_bytes())
    report = coverage_report(graph, mapping)
    document = {
        "graph_id": report.graph_id,
        "mapping_id": report.mapping_id,
        "complete": report.complete,
        "covered": sorted(report.covered),
        "uncovered": sorted(report.uncovered),
        "unmapped_modules": sorted(report.unmapped_modules),
    }
    _write_output(canonical_json(document), args.output)
    return 0


def _cmd_monitor_simulate(args) -> int:
    graph = _read_graph(args.graph)
    mapping = load_coverage_mapping(Path(args.mapping).read_bytes())
    events = load_monitor_events(Path(args.events).read_bytes())
    timeline = simulate(graph, mapping, events, ScorePolicy(args.policy))
    lines = []
    for entry in timeline:
        state = {
            key: (value.value if hasattr(value, "value") else value)
            for key, value in sorted(entry.ability_state.items())
        }
        lines.append(
            json.dumps(
                {
                    "at": entry.at,
                    "module": entry.module,
                    "value": entry.value,
                    "abilities": state,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    _write_output("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_export(args) -> int:
    graph = _read_graph(args.graph)
    text = export_dot(graph, depth_limit=args.depth, show_terminals=not args.no_terminals)
    _write_output(text, args.output)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    workspace = Path(args.workspace)
    workspace.mkdir(parents=True, exist_ok=True)
    if args.seed_demo and not any((workspace / "graphs").glob("*.json") if (workspace / "graphs").exists() else []):
        corpus_module.seed_workspace(workspace)
    app = create_app(workspace, ui_dir=Path(args.ui) if args.ui else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_COMMANDS = {
    "import": _cmd_import,
    "validate": _cmd_validate,
    "transform": _cmd_transform,
    "reduce": _cmd_reduce,
    "stats": _cmd_stats,
    "coverage": _cmd_coverage,
    "export": _cmd_export,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _emit_error("UsageError", str(exc))
        return 2
    try:
        if args.command == "merge":
            if args.merge_command == "propose":
                return _cmd_merge_propose(args)
            return _cmd_merge_apply(args)
        if args.command == "monitor":
            return _cmd_monitor_simulate(args)
        return _COMMANDS[args.command](args)
    except AbilityGraphError as exc:
        _emit_error(exc.code, exc.message)
        return 1
    except FileNotFoundError as exc:
        _emit_error("FileNotFound", str(exc))
        return 1
    except UsageError as exc:
        _emit_error("UsageError", str(exc))
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
