"""Edge-pruned circuit flavors, split-iteration plans, and the alternating
optimization loop that recovers solution quality while every backend only
ever sees a strict subgraph.

All evaluations feed the optimizer the *full* graph's cut expectation
computed client-side from the samples, regardless of which pruned flavor
produced them; that keeps approximation ratios comparable between the
original, pruned-only, and split arms.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .circuit import ParamVector, build_qaoa, transpile
from .errors import DivergenceError, MetricError, PlanError
from .graph import Edge, Graph, max_cut_bruteforce
from .optimizers import NelderMead, Spsa
from .simulator import (
    RNG_ALGORITHM,
    BackendProfile,
    ShotResult,
    expectation_full_cost,
    remap_counts,
    run_shots,
)

FINAL_EVAL_SHOTS = 16384


def prune(g: Graph, removed: Sequence[Edge]) -> Graph:
    """Remove the given edges; node count is kept so the circuit width
    cannot leak how much was pruned."""
    removed_set = {(min(u, v), max(u, v)) for u, v in removed}
    if not removed_set:
        raise ValueError("removed edge set must be nonempty")
    missing = removed_set - set(g.edges)
    if missing:
        raise ValueError(f"edges not in graph: {sorted(missing)}")
    return Graph(g.n, tuple(e for e in g.edges if e not in removed_set))


@dataclass(frozen=True)
class PrunedFlavor:
    """One pruned circuit variant and the backend it is dispatched to."""

    removed_edges: tuple[Edge, ...]
    backend: BackendProfile

    def __post_init__(self):
        normalized = tuple(sorted((min(u, v), max(u, v)) for u, v in self.removed_edges))
        object.__setattr__(self, "removed_edges", normalized)
        if not normalized:
            raise PlanError("a flavor must remove at least one edge")

    def validate_against(self, g: Graph) -> None:
        removed = set(self.removed_edges)
        if not removed <= set(g.edges):
            raise PlanError(f"flavor removes edges not in the graph: {sorted(removed - set(g.edges))}")
        if len(g.edges) > 1 and len(removed) >= len(g.edges):
            raise PlanError("flavor must leave at least one edge in the circuit")

    def pruned_graph(self, g: Graph) -> Graph:
        return prune(g, self.removed_edges)


@dataclass(frozen=True)
class SplitPlan:
    """k >= 2 flavors with distinct removed sets, alternated round-robin.

    Union rule: no edge is removed by every flavor, so the union of the
    circuits the providers see covers the full graph, while each single
    provider sees a strict subgraph.
    """

    flavors: tuple[PrunedFlavor, ...]
    schedule: str = "round_robin"
    total_iterations: int = 50

    def __post_init__(self):
        if len(self.flavors) < 2:
            raise PlanError("a split plan needs at least 2 flavors")
        if self.schedule != "round_robin":
            raise PlanError(f"unknown schedule {self.schedule!r}")
        removed_sets = [frozenset(f.removed_edges) for f in self.flavors]
        if len(set(removed_sets)) != len(removed_sets):
            raise PlanError("flavors must have distinct removed sets")
        names = [f.backend.name for f in self.flavors]
        if len(set(names)) != len(names):
            raise PlanError("flavor backends must have distinct names")

    @property
    def k(self) -> int:
        return len(self.flavors)

    def validate(self, g: Graph) -> None:
        """Assert every invariant against the full graph, union rule included."""
        for f in self.flavors:
            f.validate_against(g)
        removed_everywhere = frozenset.intersection(*(frozenset(f.removed_edges) for f in self.flavors))
        if removed_everywhere:
            raise PlanError(f"edges removed from every flavor: {sorted(removed_everywhere)}")
        covered = set()
        for f in self.flavors:
            covered |= set(f.pruned_graph(g).edges)
        if covered != set(g.edges):
            raise PlanError("flavor union does not cover the full graph")


def make_split_plan(
    g: Graph,
    k: int,
    edges_per_flavor: int,
    backends: Sequence[BackendProfile],
    seed: int,
    total_iterations: int = 50,
) -> SplitPlan:
    """Sample k distinct removed-edge sets uniformly under the union rule.

    Which edges get pruned is immaterial for final quality, so uniform
    random selection under the constraints is enough.
    """
    if k < 2:
        raise PlanError("need k >= 2 flavors")
    if len(backends) != k:
        raise PlanError(f"need exactly {k} backends, got {len(backends)}")
    m = len(g.edges)
    if edges_per_flavor < 1 or edges_per_flavor > m - 1:
        raise PlanError(f"edges_per_flavor must be in [1, {m - 1}] for this graph")
    rng = np.random.default_rng(seed)
    for _ in range(10_000):
        picks = [
            tuple(sorted(g.edges[i] for i in rng.choice(m, size=edges_per_flavor, replace=False)))
            for _ in range(k)
        ]
        if len({frozenset(p) for p in picks}) != k:
            continue
        if frozenset.intersection(*(frozenset(p) for p in picks)):
            continue
        flavors = tuple(PrunedFlavor(p, b) for p, b in zip(picks, backends))
        plan = SplitPlan(flavors, total_iterations=total_iterations)
        plan.validate(g)
        return plan
    raise PlanError("could not satisfy the union rule; graph too small for this plan")


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for one optimization run. ``seed`` drives initialization and
    the SPSA perturbation stream; evaluation shot noise is governed by the
    backend seeds."""

    method: str = "spsa"  # or "nelder_mead"
    total_iterations: int = 50
    p_layers: int = 1
    shots: int = 4096
    seed: int = 0
    spsa_a: float = 0.4
    spsa_c: float = 0.1
    spsa_A: float = 5.0
    spsa_alpha: float = 0.602
    spsa_gamma: float = 0.101
    init_params: ParamVector | None = None

    def __post_init__(self):
        if self.method not in ("spsa", "nelder_mead"):
            raise ValueError(f"unknown optimizer {self.method!r}")
        if self.total_iterations < 1:
            raise ValueError("total_iterations must be >= 1")
        if self.p_layers < 1:
            raise ValueError("p_layers must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.init_params is not None and self.init_params.p != self.p_layers:
            raise ValueError("init_params layer count must match p_layers")


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    backend: str
    flavor: int
    params: ParamVector
    expectation: float
    ar: float


@dataclass(frozen=True)
class RunTrace:
    """Everything one optimization run produced, trace plus summary."""

    entries: tuple[TraceEntry, ...]
    best_params: ParamVector
    best_observed_expectation: float
    best_observed_ar: float
    final_expectation: float
    final_ar: float
    cmax: int
    evaluations: int
    shots: int
    rng_algorithm: str = RNG_ALGORITHM

    def to_jsonl(self) -> str:
        lines = []
        for e in self.entries:
            lines.append(json.dumps({
                "iteration": e.iteration,
                "backend": e.backend,
                "flavor": e.flavor,
                "gammas": list(e.params.gammas),
                "betas": list(e.params.betas),
                "expectation": e.expectation,
                "ar": e.ar,
            }, sort_keys=True))
        lines.append(json.dumps({"summary": {
            "best_gammas": list(self.best_params.gammas),
            "best_betas": list(self.best_params.betas),
            "best_observed_expectation": self.best_observed_expectation,
            "best_observed_ar": self.best_observed_ar,
            "final_expectation": self.final_expectation,
            "final_ar": self.final_ar,
            "cmax": self.cmax,
            "evaluations": self.evaluations,
            "shots": self.shots,
            "rng_algorithm": self.rng_algorithm,
        }}, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "RunTrace":
        lines = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not lines or "summary" not in lines[-1]:
            raise ValueError("trace text must end with a summary record")
        summary = lines[-1]["summary"]
        entries = tuple(
            TraceEntry(
                iteration=e["iteration"],
                backend=e["backend"],
                flavor=e["flavor"],
                params=ParamVector(tuple(e["gammas"]), tuple(e["betas"])),
                expectation=e["expectation"],
                ar=e["ar"],
            )
            for e in lines[:-1]
        )
        return cls(
            entries=entries,
            best_params=ParamVector(tuple(summary["best_gammas"]), tuple(summary["best_betas"])),
            best_observed_expectation=summary["best_observed_expectation"],
            best_observed_ar=summary["best_observed_ar"],
            final_expectation=summary["final_expectation"],
            final_ar=summary["final_ar"],
            cmax=summary["cmax"],
            evaluations=summary["evaluations"],
            shots=summary["shots"],
            rng_algorithm=summary["rng_algorithm"],
        )


def approximation_ratio(expectation: float, cmax: int) -> float:
    """Eq. style ratio expectation / cmax, clamped to [0, 1].

    Values beyond the representable range (negative expectation, ratio
    above 1 by more than float slop) are flagged as errors rather than
    silently clamped.
    """
    if cmax < 1:
        raise MetricError("cmax must be >= 1; the ratio is undefined on edgeless graphs")
    if not math.isfinite(expectation) or expectation < 0:
        raise MetricError(f"expectation out of range: {expectation}")
    r = expectation / cmax
    if r > 1.0 + 1e-9:
        raise MetricError(f"ratio {r} exceeds 1; expectation inconsistent with cmax")
    return min(max(r, 0.0), 1.0)


@dataclass(frozen=True)
class _ResolvedFlavor:
    # Internal: the baseline arm is a pseudo-flavor with nothing removed.
    index: int
    removed: tuple[Edge, ...]
    backend: BackendProfile
    graph: Graph


def _resolve_flavors(g_full, plan, backend) -> list[_ResolvedFlavor]:
    if plan is None:
        if backend is None:
            raise ValueError("plan=None (baseline) requires an explicit backend")
        return [_ResolvedFlavor(0, (), backend, g_full)]
    if isinstance(plan, PrunedFlavor):
        plan.validate_against(g_full)
        return [_ResolvedFlavor(0, plan.removed_edges, plan.backend, plan.pruned_graph(g_full))]
    if isinstance(plan, SplitPlan):
        plan.validate(g_full)
        return [
            _ResolvedFlavor(i, f.removed_edges, f.backend, f.pruned_graph(g_full))
            for i, f in enumerate(plan.flavors)
        ]
    raise TypeError(f"plan must be SplitPlan, PrunedFlavor, or None, got {type(plan)}")


def _run_expectation(g_full: Graph, fl: _ResolvedFlavor, params: ParamVector, shots: int) -> float:
    circ = build_qaoa(fl.graph, params)
    if fl.backend.coupling is not None:
        routed = transpile(circ, fl.backend.coupling)
        raw = run_shots(routed.circuit, fl.backend, shots)
        counts = remap_counts(raw.counts, routed.final_layout)
        result = ShotResult(counts=counts, shots=shots)
    else:
        result = run_shots(circ, fl.backend, shots)
    return expectation_full_cost(g_full, result)


def _init_params(cfg: OptimizerConfig) -> ParamVector:
    if cfg.init_params is not None:
        return cfg.init_params
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, cfg.p_layers, 101]))
    gammas = rng.uniform(0.0, math.pi, size=cfg.p_layers)
    betas = rng.uniform(0.0, math.pi / 2.0, size=cfg.p_layers)
    return ParamVector(tuple(gammas), tuple(betas))


def optimize(
    g_full: Graph,
    plan: SplitPlan | PrunedFlavor | None,
    cfg: OptimizerConfig,
    backend: BackendProfile | None = None,
) -> RunTrace:
    """Run the (possibly alternating) shot-based optimization loop.

    ``plan`` selects the arm: None is the unobfuscated baseline on
    ``backend``, a single PrunedFlavor is the pruned-only arm, a SplitPlan
    alternates flavors round-robin per optimizer iteration, so every
    evaluation inside one iteration lands on one backend. cfg.total_iterations
    governs the loop regardless of the plan's declared budget.

    Final quality is the best-observed parameters re-evaluated with a fresh
    16384-shot run on the run's primary flavor (index 0): the same circuit
    family and backend the client would keep using, which removes the
    winner's-curse bias of picking the luckiest noisy trace entry.
    """
    flavors = _resolve_flavors(g_full, plan, backend)
    k = len(flavors)
    if cfg.total_iterations < 2 * k and k > 1:
        raise ValueError(f"total_iterations must be >= {2 * k} for a {k}-flavor plan")
    cmax, _ = max_cut_bruteforce(g_full)
    if cmax < 1:
        raise MetricError("edgeless graph: approximation ratio undefined")

    x0 = np.array(_init_params(cfg).to_array())
    if cfg.method == "spsa":
        opt_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, cfg.p_layers, 202]))
        opt = Spsa(
            x0, opt_rng,
            a=cfg.spsa_a, c=cfg.spsa_c, A=cfg.spsa_A,
            alpha=cfg.spsa_alpha, gamma=cfg.spsa_gamma,
        )
    else:
        opt = NelderMead(x0)

    entries: list[TraceEntry] = []
    best_x: np.ndarray | None = None
    best_f = -math.inf
    evaluations = 0

    for t in range(cfg.total_iterations):
        fl = flavors[t % k]

        def objective(x, fl=fl):
            if not np.all(np.isfinite(x)):
                raise DivergenceError(
                    f"non-finite parameters at iteration {t}", trace=tuple(entries)
                )
            return _run_expectation(g_full, fl, ParamVector.from_array(x), cfg.shots)

        evals = opt.step(objective)
        evaluations += len(evals)
        for x, fx in evals:
            if not math.isfinite(fx):
                raise DivergenceError(f"non-finite objective at iteration {t}", trace=tuple(entries))
            if fx > best_f:
                best_f, best_x = fx, np.array(x, dtype=float)
        if not np.all(np.isfinite(opt.x)):
            raise DivergenceError(f"parameters diverged at iteration {t}", trace=tuple(entries))
        mean_f = float(np.mean([fx for _, fx in evals]))
        entries.append(TraceEntry(
            iteration=t,
            backend=fl.backend.name,
            flavor=fl.index,
            params=ParamVector.from_array(opt.x),
            expectation=mean_f,
            ar=approximation_ratio(mean_f, cmax),
        ))

    best_params = ParamVector.from_array(best_x)
    final_expectation = _run_expectation(g_full, flavors[0], best_params, FINAL_EVAL_SHOTS)
    evaluations += 1

    return RunTrace(
        entries=tuple(entries),
        best_params=best_params,
        best_observed_expectation=best_f,
        best_observed_ar=approximation_ratio(best_f, cmax),
        final_expectation=final_expectation,
        final_ar=approximation_ratio(final_expectation, cmax),
        cmax=cmax,
        evaluations=evaluations,
        shots=cfg.shots,
    )


def layer_sweep(
    g: Graph,
    plan: SplitPlan | PrunedFlavor | None,
    p_values: Sequence[int],
    cfg: OptimizerConfig,
    backend: BackendProfile | None = None,
) -> list[RunTrace]:
    """One optimize run per layer count. Runs are independent: the layer
    count feeds the RNG derivation, so each p gets its own streams."""
    if not p_values:
        raise ValueError("p_values must be nonempty")
    if any(p < 1 for p in p_values):
        raise ValueError("layer counts must be >= 1")
    return [optimize(g, plan, replace(cfg, p_layers=int(p)), backend=backend) for p in p_values]
