"""Greedy spanning-tree heuristics for the s-metric and approximation ratios."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph, SpanningTree, _DSU, metric_value, require_connected, validate_spanning_tree

__all__ = ["HeuristicRun", "heuristic1", "heuristic2", "run_heuristic", "approx_ratio"]


def heuristic1(g: Graph) -> SpanningTree:
    """Maximum-weight spanning tree for edge weights ``deg_G(u) * deg_G(v)``
    (Kruskal, ties by smallest edge id)."""
    require_connected(g)
    deg = g.degrees
    order = sorted(range(g.m), key=lambda e: (-deg[g.edges[e][0]] * deg[g.edges[e][1]], e))
    dsu = _DSU(g.n)
    chosen = []
    for e in order:
        u, v = g.edges[e]
        if dsu.union(u, v):
            chosen.append(e)
            if len(chosen) == g.n - 1:
                break
    return validate_spanning_tree(g, chosen)


def heuristic2(g: Graph) -> SpanningTree:
    """Greedy star growth.

    Start with all edges at a maximum-degree vertex, then repeatedly take the
    tree vertex with the most neighbors outside the tree and attach all of
    them.  Ties go to the smallest vertex id.
    """
    require_connected(g)
    n = g.n
    if n <= 1:
        return validate_spanning_tree(g, [])
    in_tree = [False] * n
    outside = list(g.degrees)
    chosen = []

    def add_vertex(w):
        in_tree[w] = True
        for y in g.adjacency[w]:
            outside[y] -= 1

    def attach(u):
        for w in g.adjacency[u]:
            if not in_tree[w]:
                add_vertex(w)
                chosen.append(g.edge_id(u, w))

    src = min(range(n), key=lambda v: (-g.degrees[v], v))
    add_vertex(src)
    attach(src)
    while len(chosen) < n - 1:
        best = min((v for v in range(n) if in_tree[v] and outside[v]), key=lambda v: (-outside[v], v))
        attach(best)
    return validate_spanning_tree(g, chosen)


@dataclass
class HeuristicRun:
    method: str
    tree: SpanningTree
    value: int
    seconds: float


def run_heuristic(g: Graph, method: str, metric: str = "s", polish: bool = False) -> HeuristicRun:
    """Run ``"H1"`` or ``"H2"``; ``polish`` adds a local-search pass."""
    fns = {"H1": heuristic1, "H2": heuristic2}
    start = time.perf_counter()
    tree = fns[method](g)
    tag = method
    if polish:
        from .transforms import local_search

        tree = local_search(g, tree, metric)
        tag += "+LS"
    elapsed = time.perf_counter() - start
    return HeuristicRun(tag, tree, metric_value(tree, metric), elapsed)


def approx_ratio(opt_value: int, heur_value: int) -> Fraction:
    """Exact ratio ``opt / heur``."""
    if heur_value <= 0:
        raise ValueError("heuristic value must be positive")
    return Fraction(opt_value, heur_value)
