"""Exact p=1 landscape comparison: original vs pruned vs split objectives.

For each benchmark graph, grid-search the exact (shot-free) full-cost
expectation over (gamma, beta) in [0, pi)^2 for three circuit families:
the full circuit, each single-edge-pruned circuit, and the split pair's
averaged objective. Prints the attainable maxima and how parameters found
on one landscape transfer to the others. Run before trusting any
final-quality reporting convention.
"""
import numpy as np

from splitcut.circuit import ParamVector, build_qaoa
from splitcut.graph import benchmark_graph, max_cut_bruteforce
from splitcut.obfuscation import prune
from splitcut.simulator import exact_expectation

RES = 50
BENCHMARKS = ("cycle3", "cycle4", "complete4_with_diagonals", "graph5", "graph6")


def grid(fn):
    best = (-1.0, None)
    for gamma in np.linspace(0.0, np.pi, RES, endpoint=False):
        for beta in np.linspace(0.0, np.pi, RES, endpoint=False):
            val = fn(gamma, beta)
            if val > best[0]:
                best = (val, (gamma, beta))
    return best


def main():
    for name in BENCHMARKS:
        g = benchmark_graph(name)
        cmax, _ = max_cut_bruteforce(g)

        def e_of(circ_graph, gamma, beta):
            circ = build_qaoa(circ_graph, ParamVector((gamma,), (beta,)))
            return exact_expectation(g, circ)

        a_val, a_pt = grid(lambda gm, bt: e_of(g, gm, bt))
        print(f"== {name}: |E|={len(g.edges)} cmax={cmax}  A(original)={a_val/cmax:.4f}")

        # every single-edge pruning choice
        worst_b, worst_c = 2.0, 2.0
        for edge in g.edges:
            pg = prune(g, [edge])
            b_val, b_pt = grid(lambda gm, bt: e_of(pg, gm, bt))
            c_val = e_of(g, *b_pt)
            worst_b = min(worst_b, b_val / cmax)
            worst_c = min(worst_c, c_val / cmax)
            print(f"   prune {edge}: B(pruned)={b_val/cmax:.4f}  C(transfer->full)={c_val/cmax:.4f}")

        # a few split pairs (first edge vs each other edge)
        pairs = [(g.edges[0], e2) for e2 in g.edges[1:3]]
        for e1, e2 in pairs:
            pg1, pg2 = prune(g, [e1]), prune(g, [e2])
            s_val, s_pt = grid(lambda gm, bt: 0.5 * (e_of(pg1, gm, bt) + e_of(pg2, gm, bt)))
            s_full = e_of(g, *s_pt)
            s_fl0 = e_of(pg1, *s_pt)
            print(f"   split {e1}|{e2}: S(avg)={s_val/cmax:.4f}  S_full={s_full/cmax:.4f}  "
                  f"S_flavor0={s_fl0/cmax:.4f}")
        print(f"   gaps: A-B(worst)={a_val/cmax - worst_b:.4f}  A-C(worst)={a_val/cmax - worst_c:.4f}")


if __name__ == "__main__":
    main()
