"""Command-line entry points.

Subcommands: graph gen|show, run, sweep, adversary extract|effort|merge,
overhead. Experiment subcommands read one JSON spec file; the exit code is
nonzero iff an invariant assertion failed during the run.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .adversary import ExtractionReport, cross_provider_merge, effort, extract_graph
from .graph import Graph, benchmark_graph, graph_to_text, load_graph, max_cut_bruteforce, save_graph
from .harness import ExperimentSpec, overhead, run_experiment


def _cmd_graph(args) -> int:
    if args.action == "gen":
        g = benchmark_graph(args.id)
        if args.out:
            save_graph(g, args.out)
        else:
            sys.stdout.write(graph_to_text(g))
        return 0
    g = load_graph(args.file) if Path(args.file).exists() else benchmark_graph(args.file)
    cmax, witness = max_cut_bruteforce(g)
    print(f"nodes: {g.n}")
    print(f"edges ({len(g.edges)}): {' '.join(f'{u}-{v}' for u, v in g.edges)}")
    print(f"max cut: {cmax} (witness {witness})")
    return 0


def _load_spec(args) -> ExperimentSpec:
    spec = ExperimentSpec.from_json_file(args.config)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seeds=(args.seed,))
    return spec


def _cmd_run(args) -> int:
    spec = _load_spec(args)
    result = run_experiment(spec, out_dir=args.out)
    _print_rows(result.rows)
    for failure in result.failures:
        print(f"FAILED cell {failure['arm']} p={failure['p']} seed={failure['seed']}: "
              f"{failure['error']}", file=sys.stderr)
    return 0 if result.ok else 1


def _cmd_sweep(args) -> int:
    spec = _load_spec(args)
    if args.p:
        p_values = tuple(int(x) for x in args.p.split(","))
        spec = dataclasses.replace(spec, p_layers=p_values)
    result = run_experiment(spec, out_dir=args.out)
    _print_rows(result.rows)
    return 0 if result.ok else 1


def _cmd_overhead(args) -> int:
    spec = ExperimentSpec.from_json_file(args.config)
    report = overhead(spec)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def _print_rows(rows) -> None:
    for r in rows:
        print(f"{r['graph']:24s} {r['arm']:12s} p={r['p']} "
              f"AR={r['mean_ar']:.4f} +/- {r['std_ar']:.4f} ({r['n_seeds']} seeds)")


def _cmd_adversary(args) -> int:
    if args.action == "extract":
        report = extract_graph(Path(args.circuit).read_text(encoding="utf-8"))
        payload = report.to_dict()
        est = effort(report.recovered_graph.n, len(report.recovered_graph.edges))
        payload["effort"] = est.to_dict()
        payload["summary"] = (
            f"recovered {len(report.recovered_graph.edges)} edges on "
            f"{report.recovered_graph.n} nodes through {report.swap_count} swaps; "
            f"{est.candidate_edges} candidate edges leave "
            f"{est.worst_case_trials} worst-case completions"
        )
    elif args.action == "effort":
        payload = effort(args.nodes, args.observed).to_dict()
    else:
        reports = []
        for path in args.reports:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
            reports.append(ExtractionReport(
                recovered_graph=Graph.make(d["nodes"], d["edges"]),
                swap_count=d.get("swap_count", 0),
                final_mapping=tuple(d.get("final_mapping", range(d["nodes"]))),
                unmatched_gates=d.get("unmatched_gates", 0),
            ))
        merged = cross_provider_merge(reports)
        payload = {"nodes": merged.n, "edges": [list(e) for e in merged.edges]}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splitcut")
    sub = parser.add_subparsers(dest="command", required=True)

    p_graph = sub.add_parser("graph", help="generate or inspect problem graphs")
    graph_sub = p_graph.add_subparsers(dest="action", required=True)
    p_gen = graph_sub.add_parser("gen", help="write a named benchmark graph")
    p_gen.add_argument("--id", required=True, help="cycle3|cycle4|...|cycle(n)|complete(n)")
    p_gen.add_argument("--out")
    p_show = graph_sub.add_parser("show", help="print nodes, edges and exact max cut")
    p_show.add_argument("file", help="graph file or benchmark id")

    for name, fn in (("run", _cmd_run), ("sweep", _cmd_sweep)):
        p_cmd = sub.add_parser(name, help=f"{name} an experiment spec")
        p_cmd.add_argument("--config", required=True, help="experiment spec JSON")
        p_cmd.add_argument("--out", help="output directory")
        p_cmd.add_argument("--seed", type=int, help="run a single seed instead of the spec's list")
        if name == "sweep":
            p_cmd.add_argument("--p", help="comma-separated layer counts overriding the spec")
        p_cmd.set_defaults(fn=fn)

    p_over = sub.add_parser("overhead", help="static gate/evaluation cost report")
    p_over.add_argument("--config", required=True)
    p_over.add_argument("--out")
    p_over.set_defaults(fn=_cmd_overhead)

    p_adv = sub.add_parser("adversary", help="reverse-engineering tools")
    adv_sub = p_adv.add_subparsers(dest="action", required=True)
    p_ext = adv_sub.add_parser("extract", help="recover the graph from a circuit file")
    p_ext.add_argument("--circuit", required=True)
    p_ext.add_argument("--out")
    p_eff = adv_sub.add_parser("effort", help="reconstruction effort bounds")
    p_eff.add_argument("--nodes", type=int, required=True)
    p_eff.add_argument("--observed", type=int, required=True)
    p_eff.add_argument("--out")
    p_mrg = adv_sub.add_parser("merge", help="union of extraction reports (collusion)")
    p_mrg.add_argument("reports", nargs="+")
    p_mrg.add_argument("--out")

    parser.set_defaults(fn=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "graph":
        return _cmd_graph(args)
    if args.command == "adversary":
        return _cmd_adversary(args)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
