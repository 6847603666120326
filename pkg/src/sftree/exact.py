"""Exact oracles: matrix-tree counting, spanning-tree enumeration, exact
SF-dimensions, labeled trees via Pruefer codes and max-leaf quantities."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterator, Optional

from .errors import RefusedError, SolveTimeout
from .graph import Graph, SpanningTree, metric_value, require_connected

__all__ = [
    "DEFAULT_CAP",
    "ExactResult",
    "bareiss_determinant",
    "count_spanning_trees",
    "enumerate_spanning_trees",
    "solve_exact",
    "enumerate_labeled_trees",
    "complete_host",
    "max_leaf",
]

DEFAULT_CAP = 10**7


def bareiss_determinant(matrix: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; exact for integer matrices."""
    a = [list(row) for row in matrix]
    size = len(a)
    if size == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[-1][-1]


def count_spanning_trees(g: Graph) -> int:
    """Kirchhoff count: determinant of the Laplacian with row/column 0
    removed.  A disconnected graph gives 0."""
    if g.n <= 1:
        return 1
    lap = [[0] * g.n for _ in range(g.n)]
    for u, v in g.edges:
        lap[u][u] += 1
        lap[v][v] += 1
        lap[u][v] -= 1
        lap[v][u] -= 1
    minor = [row[1:] for row in lap[1:]]
    return bareiss_determinant(minor)


class _UndoDSU:
    """Union by size without path compression, so unions can be undone."""

    __slots__ = ("parent", "size", "history")

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n
        self.history = []

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.history.append(rb)

    def undo(self):
        rb = self.history.pop()
        ra = self.parent[rb]
        self.size[ra] -= self.size[rb]
        self.parent[rb] = rb


def _check_cap(g: Graph, cap: Optional[int]) -> int:
    require_connected(g)
    count = count_spanning_trees(g)
    if cap is not None and count > cap:
        raise RefusedError(
            f"graph has {count} spanning trees, above the enumeration cap {cap}", count
        )
    return count


def enumerate_spanning_trees(
    g: Graph, cap: Optional[int] = DEFAULT_CAP, deadline: Optional[float] = None
) -> Iterator[SpanningTree]:
    """Yield every spanning tree of ``g`` exactly once.

    Include/exclude backtracking over edges in id order.  Included edges are
    contracted in a union-find; an edge is excluded only if it is not a
    bridge of the graph formed by included and undecided edges, so every
    branch reaches at least one tree.  ``deadline`` is a
    ``time.monotonic()`` value checked once per tree.
    """
    _check_cap(g, cap)
    return _enumerate(g, deadline)


def _enumerate(g: Graph, deadline: Optional[float]) -> Iterator[SpanningTree]:
    n, m = g.n, g.m
    if n <= 1:
        yield SpanningTree(g, ())
        return
    edges = g.edges
    dsu = _UndoDSU(n)
    chosen: list[int] = []
    target = n - 1

    def reachable_without(i, ru, rv):
        # Are components ru and rv joined by undecided edges j > i?
        find = dsu.find
        adj: dict[int, list[int]] = {}
        for j in range(i + 1, m):
            a, b = edges[j]
            ra, rb = find(a), find(b)
            if ra != rb:
                adj.setdefault(ra, []).append(rb)
                adj.setdefault(rb, []).append(ra)
        seen = {ru}
        stack = [ru]
        while stack:
            x = stack.pop()
            for y in adj.get(x, ()):
                if y == rv:
                    return True
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    def rec(i):
        if len(chosen) == target:
            if deadline is not None and time.monotonic() > deadline:
                raise SolveTimeout("enumeration deadline exceeded")
            yield SpanningTree(g, chosen)
            return
        # Invariant: included + undecided edges from i on keep the graph connected.
        while i < m:
            u, v = edges[i]
            ru, rv = dsu.find(u), dsu.find(v)
            if ru != rv:
                break
            i += 1
        else:  # pragma: no cover - unreachable under the invariant
            return
        dsu.union(u, v)
        chosen.append(i)
        yield from rec(i + 1)
        chosen.pop()
        dsu.undo()
        if reachable_without(i, ru, rv):
            yield from rec(i + 1)

    yield from rec(0)


@dataclass
class ExactResult:
    metric: str
    optimum: int
    tree: SpanningTree
    n_optimal: int
    examined: int
    optimal_trees: list = field(default_factory=list, repr=False)


def solve_exact(
    g: Graph,
    metric: str = "s",
    cap: Optional[int] = DEFAULT_CAP,
    keep_all: bool = False,
    timeout_s: Optional[float] = None,
) -> ExactResult:
    """Maximize the s- or m-metric over all spanning trees by enumeration.

    Ties go to the first optimal tree in enumeration order.  With
    ``keep_all`` every optimal tree is kept in ``optimal_trees``.
    """
    metric_value(g, metric)  # validates the tag
    deadline = None if timeout_s is None else time.monotonic() + timeout_s
    best = None
    best_tree = None
    n_opt = 0
    examined = 0
    kept = []
    for t in enumerate_spanning_trees(g, cap, deadline):
        examined += 1
        val = metric_value(t, metric)
        if best is None or val > best:
            best, best_tree, n_opt = val, t, 1
            if keep_all:
                kept = [t]
        elif val == best:
            n_opt += 1
            if keep_all:
                kept.append(t)
    return ExactResult(metric, best, best_tree, n_opt, examined, kept)


@lru_cache(maxsize=None)
def complete_host(n: int) -> Graph:
    from .generators import complete

    return complete(n)


def _prufer_decode(seq, n):
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    deg = tuple(degree)
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    pairs = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        pairs.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    a = heapq.heappop(leaves)
    b = heapq.heappop(leaves)
    pairs.append((a, b))
    return pairs, deg


def enumerate_labeled_trees(n: int) -> Iterator[SpanningTree]:
    """All n^(n-2) labeled trees on ``0..n-1`` as spanning trees of K_n,
    one per Pruefer sequence in lexicographic order."""
    if not 2 <= n <= 9:
        raise ValueError(f"labeled tree enumeration supports 2 <= n <= 9, got {n}")
    host = complete_host(n)
    for seq in product(range(n), repeat=n - 2):
        pairs, deg = _prufer_decode(seq, n)
        yield SpanningTree(host, [host.edge_id(u, v) for u, v in pairs], deg)


def max_leaf(g: Graph, cap: Optional[int] = DEFAULT_CAP) -> tuple[int, int]:
    """``(l(G), best s among spanning trees with l(G) leaves)``."""
    best_leaves = -1
    best_s = None
    for t in enumerate_spanning_trees(g, cap):
        leaves = sum(1 for d in t.degrees if d == 1)
        if leaves > best_leaves:
            best_leaves = leaves
            best_s = metric_value(t, "s")
        elif leaves == best_leaves:
            best_s = max(best_s, metric_value(t, "s"))
    return best_leaves, best_s
