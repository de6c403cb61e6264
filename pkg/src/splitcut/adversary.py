"""The attacker's side: recover the encoded graph from a received circuit
and size the search an adversary faces to complete a pruned graph.

The extractor is a streaming pattern matcher over the wire format. It keeps
a physical->logical map, consumes cx(a,b) cx(b,a) cx(a,b) as a SWAP (map
update) and cx(a,b) rz(b,.) cx(a,b) as a ZZ edge between the mapped qubits,
and skips single-qubit rotations and the measurement. Matching is greedy
longest-match: when both could start at a cx, the exact 3-cx swap signature
wins. Repeated ZZ blocks on one pair (one per layer) collapse into a single
edge. Everything here is a pure function.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .circuit import parse
from .graph import Graph


@dataclass(frozen=True)
class ExtractionReport:
    recovered_graph: Graph
    swap_count: int
    final_mapping: tuple[int, ...]  # physical -> logical
    unmatched_gates: int

    def to_dict(self) -> dict:
        return {
            "nodes": self.recovered_graph.n,
            "edges": [list(e) for e in self.recovered_graph.edges],
            "swap_count": self.swap_count,
            "final_mapping": list(self.final_mapping),
            "unmatched_gates": self.unmatched_gates,
        }


def extract_graph(text: str) -> ExtractionReport:
    """Reconstruct the problem graph encoded in a serialized circuit."""
    c = parse(text)
    p2l = list(range(c.num_qubits))
    gates = c.gates
    edges: set[tuple[int, int]] = set()
    swaps = 0
    unmatched = 0
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.name in ("h", "rx", "measure"):
            i += 1
            continue
        if g.name == "cx":
            a, b = g.qubits
            if (
                i + 2 < len(gates)
                and gates[i + 1].name == "cx" and gates[i + 1].qubits == (b, a)
                and gates[i + 2].name == "cx" and gates[i + 2].qubits == (a, b)
            ):
                p2l[a], p2l[b] = p2l[b], p2l[a]
                swaps += 1
                i += 3
                continue
            if (
                i + 2 < len(gates)
                and gates[i + 1].name == "rz" and gates[i + 1].qubits == (b,)
                and gates[i + 2].name == "cx" and gates[i + 2].qubits == (a, b)
            ):
                u, v = p2l[a], p2l[b]
                edges.add((min(u, v), max(u, v)))
                i += 3
                continue
        unmatched += 1
        i += 1
    return ExtractionReport(
        recovered_graph=Graph.make(c.num_qubits, sorted(edges)),
        swap_count=swaps,
        final_mapping=tuple(p2l),
        unmatched_gates=unmatched,
    )


@dataclass(frozen=True)
class EffortEstimate:
    """Search-space bounds for completing an observed graph to the original."""

    n: int
    observed_edges: int
    candidate_edges: int
    worst_case_trials: int
    min_guesses: int

    @property
    def total_pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    def to_dict(self) -> dict:
        return {
            "nodes": self.n,
            "observed_edges": self.observed_edges,
            "total_pairs": self.total_pairs,
            "candidate_edges": self.candidate_edges,
            "worst_case_trials": self.worst_case_trials,
            "min_guesses": self.min_guesses,
        }


def effort(n: int, observed_edges: int) -> EffortEstimate:
    """Worst-case reconstruction effort for an n-node graph of which
    ``observed_edges`` edges were seen.

    Every unobserved node pair may or may not belong to the original graph,
    so the worst case checks 2^candidates subsets; with a single candidate
    pair there is only one possible completion.
    """
    total = n * (n - 1) // 2
    if n < 1:
        raise ValueError("need at least one node")
    if not 0 <= observed_edges <= total:
        raise ValueError(f"observed_edges must be in [0, {total}], got {observed_edges}")
    candidates = total - observed_edges
    return EffortEstimate(
        n=n,
        observed_edges=observed_edges,
        candidate_edges=candidates,
        worst_case_trials=2 ** candidates,
        min_guesses=1 if candidates >= 1 else 0,
    )


def average_case_trials(n: int) -> tuple[Fraction, float]:
    """Average guesses over all possible original graphs on n nodes,
    as (exact exponent of 2, float approximation)."""
    exponent = Fraction(n * (n - 1), 4)
    return exponent, 2.0 ** float(exponent)


def cross_provider_merge(reports: list[ExtractionReport]) -> Graph:
    """Union of the recovered edge sets: what colluding providers learn.

    By the split plan's union rule this is the full graph, while each
    single report stays strictly partial.
    """
    if not reports:
        raise ValueError("need at least one report")
    n = reports[0].recovered_graph.n
    if any(r.recovered_graph.n != n for r in reports):
        raise ValueError("reports disagree on node count")
    merged: set[tuple[int, int]] = set()
    for r in reports:
        merged |= set(r.recovered_graph.edges)
    return Graph.make(n, sorted(merged))
