"""Connected graphs with labeled vertices and multiedges of index >= 2.

A multiedge is an attachment multiset of size >= 2 over the vertices (a leg
may hit the same vertex repeatedly).  The genus weight uses the first Betti
number of the vertex-multiedge incidence structure:

    betti = (total legs) - (#multiedges) - (#vertices) + 1      (connected)

which reduces to E - V + 1 for ordinary edges.  The automorphism count is
over leg permutations within each multiedge and swaps of identical
multiedges, with the vertices held fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement


@dataclass(frozen=True)
class DualityGraph:
    n: int
    edges: tuple  # sorted tuple of sorted attachment tuples

    def betti(self) -> int:
        legs = sum(len(e) for e in self.edges)
        return legs - len(self.edges) - self.n + 1

    def aut_order(self) -> int:
        acc = 1
        for e in self.edges:
            for v in set(e):
                acc *= _factorial(e.count(v))
        mult = {}
        for e in self.edges:
            mult[e] = mult.get(e, 0) + 1
        for m in mult.values():
            acc *= _factorial(m)
        return acc

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            base = find(e[0])
            for v in e[1:]:
                r = find(v)
                if r != base:
                    parent[r] = base
        root = find(0)
        return all(find(v) == root for v in range(self.n))


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


@lru_cache(maxsize=None)
def enumerate_graphs(n: int, betti_max: int):
    """All connected graphs with n labeled vertices and betti <= betti_max.

    The edge budget Σ(|e| - 1) equals betti + n - 1, so both the number of
    multiedges and their indices are bounded.
    """
    if n < 1 or betti_max < 0:
        return ()
    budget_max = betti_max + n - 1
    all_edges = []
    for size in range(2, budget_max + 2):
        for att in combinations_with_replacement(range(n), size):
            all_edges.append(att)
    out = []

    def rec(start, remaining, chosen):
        g = DualityGraph(n, tuple(chosen))
        if g.betti() <= betti_max and g.is_connected():
            out.append(g)
        for i in range(start, len(all_edges)):
            e = all_edges[i]
            cost = len(e) - 1
            if cost <= remaining:
                chosen.append(e)
                rec(i, remaining - cost, chosen)
                chosen.pop()

    rec(0, budget_max, [])
    return tuple(sorted(out, key=lambda g: (len(g.edges), g.edges)))
