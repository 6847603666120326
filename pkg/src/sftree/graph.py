"""Graph and spanning-tree data model, Zagreb metrics, trail counting and
structural recognizers.

Vertices are the integers ``0..n-1``; edges carry dense ids in input order.
Everything here is exact integer arithmetic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Optional, Sequence

from .errors import (
    DisconnectedGraphError,
    GraphInputError,
    TreeValidationError,
)

__all__ = [
    "Graph",
    "SpanningTree",
    "TrailCounts",
    "TreeStats",
    "SplitPartition",
    "build_graph",
    "s_metric",
    "m_metric",
    "trail_counts",
    "metrics_from_trails",
    "validate_spanning_tree",
    "tree_from_pairs",
    "tree_stats",
    "recognize_split",
    "recognize_threshold",
    "connected_components",
    "is_connected",
    "require_connected",
    "read_graph",
    "write_graph",
    "parse_graph",
    "format_graph",
]


class Graph:
    """Immutable simple undirected graph.

    ``edges[i]`` is the normalized pair ``(u, v)`` with ``u < v`` of edge id
    ``i``; ``adjacency[v]`` is the sorted neighbor tuple of ``v``.
    """

    __slots__ = ("n", "edges", "adjacency", "degrees", "_index")

    def __init__(self, n: int, edges: Sequence[tuple[int, int]]):
        adj: list[list[int]] = [[] for _ in range(n)]
        index = {}
        for i, (u, v) in enumerate(edges):
            index[(u, v)] = i
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))
        object.__setattr__(self, "degrees", tuple(len(a) for a in adj))
        object.__setattr__(self, "_index", index)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __reduce__(self):
        return (Graph, (self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def edge_id(self, u: int, v: int) -> Optional[int]:
        if u > v:
            u, v = v, u
        return self._index.get((u, v))

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_id(u, v) is not None

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    """Validate and normalize an edge list into a :class:`Graph`.

    Raises :class:`GraphInputError` naming the offending pair on a loop,
    a duplicate (in either orientation) or an out-of-range endpoint.
    """
    if n < 0:
        raise GraphInputError(f"vertex count must be nonnegative, got {n}")
    seen = set()
    normalized = []
    for pair in edge_list:
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphInputError(f"vertex out of range in edge ({u}, {v}) for n={n}", (u, v))
        if u == v:
            raise GraphInputError(f"loop at vertex {u}", (u, v))
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise GraphInputError(f"duplicate edge ({u}, {v})", (u, v))
        seen.add(key)
        normalized.append(key)
    return Graph(n, normalized)


class SpanningTree:
    """A set of ``n - 1`` host edge ids forming a spanning tree.

    Build through :func:`validate_spanning_tree`; the constructor itself
    trusts its input.
    """

    __slots__ = ("host", "tree_edges", "degrees", "_adjacency")

    def __init__(self, host: Graph, tree_edges: Iterable[int], degrees=None):
        tree_edges = frozenset(tree_edges)
        if degrees is None:
            deg = [0] * host.n
            for e in tree_edges:
                u, v = host.edges[e]
                deg[u] += 1
                deg[v] += 1
            degrees = tuple(deg)
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "tree_edges", tree_edges)
        object.__setattr__(self, "degrees", tuple(degrees))
        object.__setattr__(self, "_adjacency", None)

    def __setattr__(self, name, value):
        raise AttributeError("SpanningTree is immutable")

    def __reduce__(self):
        return (SpanningTree, (self.host, self.tree_edges, self.degrees))

    @property
    def n(self) -> int:
        return self.host.n

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.tree_edges))

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(self.host.edges[e] for e in self.edge_ids)

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        if self._adjacency is None:
            adj: list[list[int]] = [[] for _ in range(self.n)]
            for u, v in self.edges:
                adj[u].append(v)
                adj[v].append(u)
            object.__setattr__(self, "_adjacency", tuple(tuple(sorted(a)) for a in adj))
        return self._adjacency

    def as_graph(self) -> Graph:
        return Graph(self.n, sorted(self.edges))

    def __eq__(self, other):
        return (
            isinstance(other, SpanningTree)
            and self.host == other.host
            and self.tree_edges == other.tree_edges
        )

    def __hash__(self):
        return hash(self.tree_edges)

    def __repr__(self):
        return f"SpanningTree(n={self.n}, edges={list(self.edges)})"


# -- metrics -----------------------------------------------------------------

def s_metric(g) -> int:
    """Second Zagreb index: sum over edges of deg(u) * deg(v).

    Accepts a :class:`Graph` or a :class:`SpanningTree` (tree degrees).
    """
    deg = g.degrees
    return sum(deg[u] * deg[v] for u, v in g.edges)


def m_metric(g) -> int:
    """First Zagreb index: sum of squared degrees."""
    return sum(d * d for d in g.degrees)


def metric_value(g, metric: str) -> int:
    if metric == "s":
        return s_metric(g)
    if metric == "m":
        return m_metric(g)
    raise ValueError(f"unknown metric {metric!r} (expected 's' or 'm')")


@dataclass(frozen=True)
class TrailCounts:
    gamma1: int
    gamma2: int
    gamma3: int


def trail_counts(g) -> TrailCounts:
    """Numbers of trails with 1, 2 and 3 edges.

    A 3-edge trail is determined by its middle edge ``uv`` and one further
    edge at each end, so there are ``(deg u - 1)(deg v - 1)`` per middle
    edge; closed triangle traversals are included, once per middle edge.
    """
    deg = g.degrees
    g1 = len(g.edges)
    g2 = sum(comb(d, 2) for d in deg)
    g3 = sum((deg[u] - 1) * (deg[v] - 1) for u, v in g.edges)
    return TrailCounts(g1, g2, g3)


def metrics_from_trails(tc: TrailCounts) -> tuple[int, int]:
    """Return ``(m, s)`` from trail counts."""
    m = 2 * tc.gamma2 + 2 * tc.gamma1
    s = tc.gamma3 + 2 * tc.gamma2 + tc.gamma1
    return m, s


# -- connectivity ------------------------------------------------------------

def connected_components(g: Graph) -> list[list[int]]:
    """Vertex sets of the connected components, each sorted, ordered by
    smallest member."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.adjacency[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


def require_connected(g: Graph) -> None:
    if not is_connected(g):
        k = len(connected_components(g))
        raise DisconnectedGraphError(f"graph is disconnected ({k} components)")


# -- spanning trees ----------------------------------------------------------

class _DSU:
    __slots__ = ("parent",)

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def validate_spanning_tree(g: Graph, edge_ids: Iterable[int]) -> SpanningTree:
    """Check that ``edge_ids`` is a spanning tree of ``g``.

    Each failure mode raises :class:`TreeValidationError` with its own
    ``kind``: ``bad_edge``, ``wrong_count``, ``cycle`` or ``disconnected``.
    """
    ids = []
    for e in edge_ids:
        if not isinstance(e, int) or not 0 <= e < g.m:
            raise TreeValidationError("bad_edge", f"edge id {e!r} not in host (m={g.m})")
        ids.append(e)
    ids_set = frozenset(ids)
    if len(ids_set) != len(ids):
        raise TreeValidationError("bad_edge", "repeated edge id")
    expected = max(g.n - 1, 0)
    if len(ids_set) != expected:
        raise TreeValidationError(
            "wrong_count", f"a spanning tree of {g.n} vertices needs {expected} edges, got {len(ids_set)}"
        )
    dsu = _DSU(g.n)
    for e in sorted(ids_set):
        u, v = g.edges[e]
        if not dsu.union(u, v):
            raise TreeValidationError("cycle", f"edge {e} ({u}, {v}) closes a cycle")
    # n-1 acyclic edges on n vertices are always connected; kept for edge
    # sets that come from sources other than this function's count check.
    root = dsu.find(0) if g.n else None
    if any(dsu.find(v) != root for v in range(g.n)):
        raise TreeValidationError("disconnected", "edge set does not span the host")
    return SpanningTree(g, ids_set)


def tree_from_pairs(g: Graph, pairs: Iterable[Sequence[int]]) -> SpanningTree:
    """Validate a spanning tree given by vertex pairs instead of edge ids."""
    ids = []
    for u, v in pairs:
        e = g.edge_id(u, v)
        if e is None:
            raise TreeValidationError("bad_edge", f"({u}, {v}) is not an edge of the host")
        ids.append(e)
    return validate_spanning_tree(g, ids)


@dataclass(frozen=True)
class TreeStats:
    leaves: int
    diameter: int
    degree_histogram: dict
    pendant_2paths: int

    def count(self, degree: int) -> int:
        return self.degree_histogram.get(degree, 0)


def _bfs_far(adj, start):
    dist = {start: 0}
    queue = deque([start])
    far = start
    while queue:
        x = queue.popleft()
        if dist[x] > dist[far]:
            far = x
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return far, dist[far]


def tree_stats(t) -> TreeStats:
    """Leaves, diameter (double BFS sweep), degree histogram and the number
    of pendant 2-paths (leaves whose neighbor has degree 2)."""
    n = t.n
    deg = t.degrees
    adj = t.adjacency
    hist: dict[int, int] = {}
    for d in deg:
        hist[d] = hist.get(d, 0) + 1
    leaves = hist.get(1, 0)
    if n <= 1:
        diameter = 0
    else:
        a, _ = _bfs_far(adj, 0)
        _, diameter = _bfs_far(adj, a)
    p2 = sum(1 for v in range(n) if deg[v] == 1 and deg[adj[v][0]] == 2)
    return TreeStats(leaves, diameter, dict(sorted(hist.items())), p2)


# -- split / threshold recognition ------------------------------------------

@dataclass(frozen=True)
class SplitPartition:
    K: tuple[int, ...]
    I: tuple[int, ...]

    @property
    def omega(self) -> int:
        return len(self.K)


def recognize_split(g: Graph) -> Optional[SplitPartition]:
    """Split partition with a maximum clique ``K``, or ``None``.

    Uses the degree-sequence criterion: with degrees sorted non-increasingly
    and ``k = max{i : d_i >= i - 1}``, the graph is split iff
    ``sum_{i<=k} d_i == k(k-1) + sum_{i>k} d_i``; then the ``k`` largest
    degree vertices form a maximum clique.  Among all partitions with a
    maximum clique the lexicographically smallest ``K`` is returned.
    """
    n = g.n
    if n == 0:
        return SplitPartition((), ())
    order = sorted(range(n), key=lambda v: (-g.degrees[v], v))
    d = [g.degrees[v] for v in order]
    k = max(i for i in range(1, n + 1) if d[i - 1] >= i - 1)
    if sum(d[:k]) != k * (k - 1) + sum(d[k:]):
        return None
    K = set(order[:k])
    I = set(order[k:])
    # Defensive: the criterion guarantees both properties.
    if any(not g.has_edge(a, b) for a, b in combinations(sorted(K), 2)):
        return None
    if any(w in I for u in I for w in g.adjacency[u]):
        return None
    # Maximality: an I vertex adjacent to all of K would enlarge the clique.
    for v in sorted(I):
        if all(g.has_edge(v, u) for u in K):
            K.add(v)
            I.discard(v)
    # Two maximum-clique partitions differ by at most one swapped pair, so
    # scanning single swaps finds the lexicographically smallest K.
    best = tuple(sorted(K))
    for x in K:
        rest = K - {x}
        for y in I:
            if all(g.has_edge(y, u) for u in rest) and not any(
                w in I and w != y for w in g.adjacency[x]
            ):
                best = min(best, tuple(sorted(rest | {y})))
    K = set(best)
    return SplitPartition(best, tuple(v for v in range(n) if v not in K))


def recognize_threshold(g: Graph) -> Optional[list[int]]:
    """Elimination order stripping a universal-or-isolated vertex (smallest
    id first) at each step, or ``None`` if the graph is not threshold."""
    alive = set(range(g.n))
    deg = list(g.degrees)
    order = []
    while alive:
        size = len(alive)
        pick = None
        for v in sorted(alive):
            if deg[v] == 0 or deg[v] == size - 1:
                pick = v
                break
        if pick is None:
            return None
        order.append(pick)
        alive.discard(pick)
        for w in g.adjacency[pick]:
            if w in alive:
                deg[w] -= 1
    return order


# -- text format ---------------------------------------------------------------

def parse_graph(text: str) -> Graph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"``."""
    tokens = [line.split() for line in text.splitlines()]
    tokens = [t for t in tokens if t and not t[0].startswith("#")]
    if not tokens or len(tokens[0]) != 2:
        raise GraphInputError("first line must be 'n m'")
    try:
        n, m = int(tokens[0][0]), int(tokens[0][1])
        pairs = [(int(t[0]), int(t[1])) for t in tokens[1:]]
    except ValueError as exc:
        raise GraphInputError(f"non-integer token: {exc}") from None
    if any(len(t) != 2 for t in tokens[1:]):
        raise GraphInputError("edge lines must have exactly two vertices")
    if len(pairs) != m:
        raise GraphInputError(f"header announces {m} edges, found {len(pairs)}")
    return build_graph(n, pairs)


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    try:
        with open(path) as fh:
            return parse_graph(fh.read())
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc}") from None


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))
