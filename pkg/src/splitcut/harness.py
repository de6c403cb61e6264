"""Experiment runner: original vs pruned-only vs split arms over layer and
seed grids, with CSV results, JSON-line traces, overhead accounting, and the
adversary's partial-knowledge check wired in as a release gate.

Cells run sequentially in spec order; every cell derives its own RNG streams
from the cell seed, so runs with identical specs reproduce outputs
byte-for-byte. Cells are independent and could be fanned out across workers
as long as aggregation keeps spec order.
"""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adversary import cross_provider_merge, extract_graph
from .circuit import ParamVector, build_qaoa, serialize, transpile
from .graph import Graph, benchmark_graph, load_graph
from .obfuscation import (
    OptimizerConfig,
    PrunedFlavor,
    RunTrace,
    SplitPlan,
    make_split_plan,
    optimize,
)
from .simulator import BackendProfile, load_backend_profiles

ARMS = ("original", "pruned_only", "split")

CSV_HEADER = ("graph", "spec", "sim", "arm", "p", "mean_ar", "std_ar", "n_seeds")


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a graph, a set of arms, and the sweep grids."""

    graph: str  # benchmark id, or a path to a graph file
    arms: tuple[str, ...] = ("original", "pruned_only", "split")
    k: int = 2
    edges_per_flavor: int = 1
    removed_sets: tuple[tuple[tuple[int, int], ...], ...] | None = None
    p_layers: tuple[int, ...] = (1,)
    seeds: tuple[int, ...] = tuple(range(10))
    backends: tuple[str, ...] = ("ideal1", "ideal2")
    profiles_file: str | None = None
    shots: int = 4096
    iterations: int = 50
    optimizer: str = "spsa"

    def __post_init__(self):
        if not self.arms:
            raise ValueError("need at least one arm")
        for arm in self.arms:
            if arm not in ARMS:
                raise ValueError(f"unknown arm {arm!r}")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if not self.p_layers:
            raise ValueError("need at least one layer count")
        if self.removed_sets is not None and len(self.removed_sets) != self.k:
            raise ValueError("removed_sets must list one edge set per flavor")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        removed = d.get("removed_sets")
        if removed is not None:
            removed = tuple(tuple((int(u), int(v)) for u, v in flavor) for flavor in removed)
        return cls(
            graph=d["graph"],
            arms=tuple(d.get("arms", ("original", "pruned_only", "split"))),
            k=int(d.get("k", 2)),
            edges_per_flavor=int(d.get("edges_per_flavor", 1)),
            removed_sets=removed,
            p_layers=tuple(int(p) for p in d.get("p_layers", (1,))),
            seeds=tuple(int(s) for s in d.get("seeds", range(10))),
            backends=tuple(d.get("backends", ("ideal1", "ideal2"))),
            profiles_file=d.get("profiles_file"),
            shots=int(d.get("shots", 4096)),
            iterations=int(d.get("iterations", 50)),
            optimizer=d.get("optimizer", "spsa"),
        )

    @classmethod
    def from_json_file(cls, path) -> "ExperimentSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def resolve_graph(spec: ExperimentSpec) -> tuple[str, Graph]:
    if os.path.exists(spec.graph):
        return Path(spec.graph).stem, load_graph(spec.graph)
    return spec.graph, benchmark_graph(spec.graph)


def resolve_backends(spec: ExperimentSpec) -> list[BackendProfile]:
    profiles = load_backend_profiles(spec.profiles_file)
    missing = [b for b in spec.backends if b not in profiles]
    if missing:
        raise ValueError(f"unknown backend profiles: {missing}")
    return [profiles[b] for b in spec.backends]


def _plan_seed(seed: int) -> int:
    return int(np.random.SeedSequence([seed, 303]).generate_state(1)[0])


def _plan_for_seed(g: Graph, spec: ExperimentSpec, backends, seed: int) -> SplitPlan:
    if spec.removed_sets is not None:
        flavors = tuple(
            PrunedFlavor(rs, b) for rs, b in zip(spec.removed_sets, backends[: spec.k])
        )
        plan = SplitPlan(flavors, total_iterations=spec.iterations)
        plan.validate(g)
        return plan
    return make_split_plan(
        g, spec.k, spec.edges_per_flavor, backends[: spec.k],
        seed=_plan_seed(seed), total_iterations=spec.iterations,
    )


def _spec_label(spec: ExperimentSpec, arm: str) -> str:
    if arm == "original":
        return "-"
    if spec.removed_sets is not None:
        sets = spec.removed_sets if arm == "split" else spec.removed_sets[:1]
        return "-".join("+".join(f"{u}.{v}" for u, v in rs) for rs in sets)
    k = spec.k if arm == "split" else 1
    return f"rand:{k}x{spec.edges_per_flavor}"


def _sim_kind(backends: list[BackendProfile]) -> str:
    return "noisy" if any(b.is_noisy for b in backends) else "ideal"


@dataclass
class OverheadReport:
    """Static gate counts plus dynamic evaluation counts, normalized against
    the single-layer pruned-only baseline (2q-gates x evaluations)."""

    baseline: dict
    arms: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"baseline": self.baseline, "arms": self.arms}


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    graph_label: str
    rows: list[dict]
    traces: dict[tuple[str, int, int], RunTrace]
    overhead: OverheadReport
    failures: list[dict]

    @property
    def ok(self) -> bool:
        """False iff an invariant assertion (not a mere cell error) failed."""
        return not any(f["kind"] == "invariant" for f in self.failures)


def _circuit_stats(g: Graph, p: int, backend: BackendProfile) -> dict:
    # Angles do not change gate counts; build at zero angles.
    params = ParamVector((0.0,) * p, (0.0,) * p)
    circ = build_qaoa(g, params)
    swaps = 0
    if backend.coupling is not None:
        routed = transpile(circ, backend.coupling)
        swaps = routed.swap_count
        circ = routed.circuit
    counts = circ.gate_counts()
    return {
        "backend": backend.name,
        "gates_1q": counts["1q"],
        "gates_2q": counts["2q"],
        "swap_added_2q": 3 * swaps,
        "depth": circ.depth(),
    }


def _arm_flavor_graphs(g: Graph, arm: str, plan: SplitPlan) -> list[tuple[Graph, BackendProfile]]:
    if arm == "original":
        return [(g, plan.flavors[0].backend)]
    if arm == "pruned_only":
        return [(plan.flavors[0].pruned_graph(g), plan.flavors[0].backend)]
    return [(f.pruned_graph(g), f.backend) for f in plan.flavors]


def compute_overhead(
    spec: ExperimentSpec,
    g: Graph,
    backends: list[BackendProfile],
    evaluations: dict[tuple[str, int], dict[str, int]] | None = None,
) -> OverheadReport:
    """Overhead accounting for every (arm, p) in the spec.

    ``evaluations`` maps (arm, p) to per-backend optimizer evaluation
    counts; when absent they are derived statically (SPSA does exactly two
    per iteration). The relative cost is sum(2q x evals) over an arm's
    backends divided by the same product for the single-layer pruned-only
    baseline; the one final audit evaluation is reported but kept out of
    the ratio.
    """
    plan = _plan_for_seed(g, spec, backends, spec.seeds[0])

    def static_evals(arm: str) -> dict[str, int]:
        if spec.optimizer != "spsa":
            return {}
        per_iter = 2
        if arm == "split":
            out = {}
            for i, f in enumerate(plan.flavors):
                n_iter = len(range(i, spec.iterations, plan.k))
                out[f.backend.name] = per_iter * n_iter
            return out
        return {backends[0].name: per_iter * spec.iterations}

    def arm_entry(arm: str, p: int) -> dict:
        per_backend = []
        work = 0
        evals_map = (evaluations or {}).get((arm, p)) or static_evals(arm)
        for fg, backend in _arm_flavor_graphs(g, arm, plan):
            stats = _circuit_stats(fg, p, backend)
            stats["evaluations"] = evals_map.get(backend.name)
            per_backend.append(stats)
            if stats["evaluations"] is not None:
                work += stats["gates_2q"] * stats["evaluations"]
        total_evals = sum(v for v in evals_map.values()) + 1 if evals_map else None
        return {
            "arm": arm,
            "p": p,
            "per_backend": per_backend,
            "total_shot_evaluations": total_evals,
            "work_2q_x_evals": work if evals_map else None,
        }

    baseline_stats = _circuit_stats(plan.flavors[0].pruned_graph(g), 1, backends[0])
    baseline_evals = 2 * spec.iterations if spec.optimizer == "spsa" else None
    baseline_work = (
        baseline_stats["gates_2q"] * baseline_evals if baseline_evals is not None else None
    )
    baseline = dict(baseline_stats, evaluations=baseline_evals, work_2q_x_evals=baseline_work)

    report = OverheadReport(baseline=baseline)
    for arm in spec.arms:
        for p in spec.p_layers:
            entry = arm_entry(arm, p)
            if entry["work_2q_x_evals"] and baseline_work:
                entry["relative_cost"] = entry["work_2q_x_evals"] / baseline_work
            else:
                entry["relative_cost"] = None
            report.arms.append(entry)
    return report


def overhead(spec: ExperimentSpec) -> OverheadReport:
    """Static overhead report for a spec (no optimization runs)."""
    label, g = resolve_graph(spec)
    backends = resolve_backends(spec)
    return compute_overhead(spec, g, backends)


def _check_partial_knowledge(g: Graph, plan: SplitPlan, trace: RunTrace) -> list[dict]:
    """Extract each flavor's wire circuit; assert every provider sees a
    strict subgraph and that only collusion recovers the full graph."""
    reports = []
    for f in plan.flavors:
        circ = build_qaoa(f.pruned_graph(g), trace.best_params)
        if f.backend.coupling is not None:
            circ = transpile(circ, f.backend.coupling).circuit
        reports.append(extract_graph(serialize(circ)))
    full = set(g.edges)
    for f, rep in zip(plan.flavors, reports):
        seen = set(rep.recovered_graph.edges)
        if not seen < full:
            raise AssertionError(
                f"backend {f.backend.name} sees {sorted(seen)}, not a strict subset of the graph"
            )
    if set(cross_provider_merge(reports).edges) != full:
        raise AssertionError("union of flavors does not cover the full graph")
    return [r.to_dict() for r in reports]


def run_experiment(spec: ExperimentSpec, out_dir=None) -> ExperimentResult:
    """Execute every (arm, p, seed) cell, aggregate the result table, and
    write results.csv / traces / overhead.json when out_dir is given.

    A failing cell marks its row rather than aborting the sweep; adversary
    partial-knowledge violations in split arms are recorded as failures.
    """
    label, g = resolve_graph(spec)
    backends = resolve_backends(spec)

    rows: list[dict] = []
    traces: dict[tuple[str, int, int], RunTrace] = {}
    failures: list[dict] = []
    adversary_reports: dict[str, list[dict]] = {}
    circuits: dict[str, str] = {}
    evaluations: dict[tuple[str, int], dict[str, int]] = {}

    def wire_text(flavor_graph: Graph, backend: BackendProfile, params) -> str:
        circ = build_qaoa(flavor_graph, params)
        if backend.coupling is not None:
            circ = transpile(circ, backend.coupling).circuit
        return serialize(circ)

    for arm in spec.arms:
        arm_backends = backends if arm == "split" else backends[:1]
        for p in spec.p_layers:
            finals: list[float] = []
            for seed in spec.seeds:
                cfg = OptimizerConfig(
                    method=spec.optimizer,
                    total_iterations=spec.iterations,
                    p_layers=p,
                    shots=spec.shots,
                    seed=seed,
                )
                try:
                    plan = None
                    if arm == "original":
                        trace = optimize(g, None, cfg, backend=backends[0])
                    else:
                        plan = _plan_for_seed(g, spec, backends, seed)
                        if arm == "pruned_only":
                            flavor = PrunedFlavor(plan.flavors[0].removed_edges, backends[0])
                            trace = optimize(g, flavor, cfg)
                        else:
                            trace = optimize(g, plan, cfg)
                            reports = _check_partial_knowledge(g, plan, trace)
                            if seed == spec.seeds[0]:
                                adversary_reports[f"split_p{p}"] = reports
                except AssertionError as exc:  # invariant violation: poisons the run
                    failures.append({"arm": arm, "p": p, "seed": seed,
                                     "kind": "invariant", "error": str(exc)})
                    continue
                except Exception as exc:  # cell failure: record, keep sweeping
                    failures.append({"arm": arm, "p": p, "seed": seed,
                                     "kind": "cell", "error": str(exc)})
                    continue
                if seed == spec.seeds[0]:
                    # the wire artifacts the provider(s) would receive
                    if arm == "original":
                        circuits[f"original_p{p}.txt"] = wire_text(g, backends[0], trace.best_params)
                    elif arm == "pruned_only":
                        circuits[f"pruned_only_p{p}.txt"] = wire_text(
                            plan.flavors[0].pruned_graph(g), backends[0], trace.best_params)
                    else:
                        for i, fl in enumerate(plan.flavors):
                            circuits[f"split_p{p}_flavor{i}.txt"] = wire_text(
                                fl.pruned_graph(g), fl.backend, trace.best_params)
                traces[(arm, p, seed)] = trace
                finals.append(trace.final_ar)
                if spec.optimizer == "spsa":
                    per_backend: dict[str, int] = {}
                    for e in trace.entries:
                        per_backend[e.backend] = per_backend.get(e.backend, 0) + 1
                    evaluations[(arm, p)] = {b: n * 2 for b, n in per_backend.items()}
                else:
                    evaluations[(arm, p)] = _nm_eval_counts(trace)
            mean = float(np.mean(finals)) if finals else float("nan")
            std = float(np.std(finals, ddof=1)) if len(finals) > 1 else 0.0
            if not finals:
                std = float("nan")
            rows.append({
                "graph": label,
                "spec": _spec_label(spec, arm),
                "sim": _sim_kind(arm_backends),
                "arm": arm,
                "p": p,
                "mean_ar": mean,
                "std_ar": std,
                "n_seeds": len(finals),
            })

    report = compute_overhead(spec, g, backends, evaluations)
    result = ExperimentResult(
        spec=spec, graph_label=label, rows=rows, traces=traces,
        overhead=report, failures=failures,
    )
    if out_dir is not None:
        _write_outputs(result, adversary_reports, circuits, out_dir)
    return result


def _nm_eval_counts(trace: RunTrace) -> dict[str, int]:
    # Nelder-Mead evaluation counts per backend are not static; attribute
    # the run's actual evaluations (minus the final audit) proportionally
    # to iterations per backend.
    per_backend: dict[str, int] = {}
    for e in trace.entries:
        per_backend[e.backend] = per_backend.get(e.backend, 0) + 1
    total_iters = len(trace.entries)
    optimizer_evals = trace.evaluations - 1
    return {
        b: round(optimizer_evals * n / total_iters) for b, n in sorted(per_backend.items())
    }


def results_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([
            r["graph"], r["spec"], r["sim"], r["arm"], r["p"],
            _fmt(r["mean_ar"]), _fmt(r["std_ar"]), r["n_seeds"],
        ])
    return buf.getvalue()


def _fmt(x: float) -> str:
    return "nan" if isinstance(x, float) and np.isnan(x) else f"{x:.6f}"


def read_results(path) -> list[dict]:
    """Read a results CSV back into typed rows."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
        rows = []
        for rec in reader:
            rows.append({
                "graph": rec["graph"],
                "spec": rec["spec"],
                "sim": rec["sim"],
                "arm": rec["arm"],
                "p": int(rec["p"]),
                "mean_ar": float(rec["mean_ar"]),
                "std_ar": float(rec["std_ar"]),
                "n_seeds": int(rec["n_seeds"]),
            })
        return rows


def _write_outputs(result: ExperimentResult, adversary_reports: dict,
                   circuits: dict[str, str], out_dir) -> None:
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(results_to_csv(result.rows), encoding="utf-8", newline="\n")
    if circuits:
        (out / "circuits").mkdir(exist_ok=True)
        for name, text in circuits.items():
            (out / "circuits" / name).write_text(text, encoding="utf-8", newline="\n")
    with open(out / "overhead.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(result.overhead.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    for (arm, p, seed), trace in result.traces.items():
        name = f"{arm}_p{p}_seed{seed}.jsonl"
        (out / "traces" / name).write_text(trace.to_jsonl(), encoding="utf-8", newline="\n")
    if adversary_reports:
        with open(out / "adversary.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(adversary_reports, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if result.failures:
        with open(out / "failures.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(result.failures, fh, indent=2, sort_keys=True)
            fh.write("\n")
