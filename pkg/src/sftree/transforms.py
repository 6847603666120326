"""Neighbor switches on spanning trees and a switch-based hill climber.

A switch ``S_{v->u}^B`` moves the neighbors ``B`` of ``v`` (none of them on
the ``u``-``v`` tree path) over to ``u``.  Only the degrees of ``u`` and
``v`` change, which gives cheap closed forms for the metric deltas.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import MissingHostEdgeError, SwitchError
from .exact import complete_host
from .graph import Graph, SpanningTree, metric_value

__all__ = [
    "NeighborSwitch",
    "tree_path",
    "make_switch",
    "total_switch",
    "apply_switch",
    "switch_delta_s",
    "switch_delta_m",
    "local_search",
    "LocalSearchTrace",
]


@dataclass(frozen=True)
class NeighborSwitch:
    u: int
    v: int
    B: frozenset
    u_plus: int
    v_minus: int
    p: int
    t: int
    q: int
    r: int
    alpha: int
    beta: int
    D_A: int
    D_B: int
    D_C: int

    @property
    def adjacent(self) -> bool:
        return self.u_plus == self.v

    @property
    def is_total(self) -> bool:
        return self.r == 0


def tree_path(t: SpanningTree, u: int, v: int) -> list[int]:
    """Vertices of the unique tree path from ``u`` to ``v``."""
    adj = t.adjacency
    parent = {u: u}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == v:
            break
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    if v not in parent:
        raise SwitchError(f"no tree path between {u} and {v}")
    out = [v]
    while out[-1] != u:
        out.append(parent[out[-1]])
    return out[::-1]


def make_switch(t: SpanningTree, u: int, v: int, b: Iterable[int]) -> NeighborSwitch:
    """Describe the switch moving ``b`` from ``v`` to ``u``, with the
    bookkeeping degrees ``p, t, q, r, alpha, beta`` and neighbor-degree sums
    ``D_A, D_B, D_C`` taken in ``t``."""
    B = frozenset(b)
    if u == v:
        raise SwitchError("u and v must differ")
    if not (0 <= u < t.n and 0 <= v < t.n):
        raise SwitchError("vertex out of range")
    deg = t.degrees
    if deg[v] < 2:
        raise SwitchError(f"v={v} has tree degree {deg[v]} < 2; nothing to switch")
    if not B:
        raise SwitchError("B must be nonempty")
    path = tree_path(t, u, v)
    u_plus, v_minus = path[1], path[-2]
    nv = set(t.adjacency[v])
    if v_minus in B:
        raise SwitchError(f"B contains v's path neighbor {v_minus}")
    if not B <= nv:
        raise SwitchError(f"B must be a subset of the tree neighbors of v={v}")
    C = nv - B - {v_minus}
    A = set(t.adjacency[u]) - {u_plus}
    return NeighborSwitch(
        u=u,
        v=v,
        B=B,
        u_plus=u_plus,
        v_minus=v_minus,
        p=deg[u],
        t=deg[v],
        q=len(B),
        r=len(C),
        alpha=deg[u_plus],
        beta=deg[v_minus],
        D_A=sum(deg[a] for a in A),
        D_B=sum(deg[x] for x in B),
        D_C=sum(deg[c] for c in C),
    )


def total_switch(t: SpanningTree, u: int, v: int) -> NeighborSwitch:
    """The switch moving every non-path neighbor of ``v`` to ``u``."""
    v_minus = tree_path(t, u, v)[-2]
    return make_switch(t, u, v, set(t.adjacency[v]) - {v_minus})


def apply_switch(t: SpanningTree, sw: NeighborSwitch, constrained: bool = True) -> SpanningTree:
    """Delete the edges ``v b`` and add ``u b`` for ``b`` in ``B``.

    In the constrained variant every new edge must be a host edge
    (:class:`MissingHostEdgeError` otherwise).  Unconstrained, the result
    is re-hosted on the complete graph of the same order.
    """
    host = t.host
    new_ids = []
    for b in sorted(sw.B):
        e = host.edge_id(sw.u, b)
        if e is None:
            if constrained:
                raise MissingHostEdgeError((min(sw.u, b), max(sw.u, b)))
            return _apply_on_complete(t, sw)
        new_ids.append(e)
    removed = {host.edge_id(sw.v, b) for b in sw.B}
    ids = (t.tree_edges - removed) | set(new_ids)
    deg = list(t.degrees)
    deg[sw.u] += sw.q
    deg[sw.v] -= sw.q
    return SpanningTree(host, ids, deg)


def _apply_on_complete(t, sw):
    kn = complete_host(t.n)
    pairs = {tuple(sorted(p)) for p in t.edges}
    for b in sw.B:
        pairs.discard(tuple(sorted((sw.v, b))))
        pairs.add(tuple(sorted((sw.u, b))))
    deg = list(t.degrees)
    deg[sw.u] += sw.q
    deg[sw.v] -= sw.q
    return SpanningTree(kn, [kn.edge_id(a, b) for a, b in pairs], deg)


def switch_delta_s(t: SpanningTree, sw: NeighborSwitch) -> int:
    """Change of the s-metric caused by ``sw``.

    Non-adjacent ``u, v``: ``q(alpha - beta) + D_B(p - r - 1) + q(D_A - D_C)``.
    Adjacent ``u, v``: recomputed from the switched tree.
    """
    if not sw.adjacent:
        return sw.q * (sw.alpha - sw.beta) + sw.D_B * (sw.p - sw.r - 1) + sw.q * (sw.D_A - sw.D_C)
    after = apply_switch(t, sw, constrained=False)
    return metric_value(after, "s") - metric_value(t, "s")


def switch_delta_m(t: SpanningTree, sw: NeighborSwitch) -> int:
    """Change of the m-metric: ``2q(p - r - 1)``."""
    return 2 * sw.q * (sw.p - sw.r - 1)


# -- local search ------------------------------------------------------------

@dataclass
class LocalSearchTrace:
    tree: SpanningTree
    values: list
    moves: list

    @property
    def value(self) -> int:
        return self.values[-1]


def _rooted(adj, root):
    """Parent pointers and, per vertex, the child of ``root`` whose subtree
    holds it."""
    n = len(adj)
    parent = [-1] * n
    branch = [-1] * n
    parent[root] = root
    queue = deque()
    for c in adj[root]:
        parent[c] = root
        branch[c] = c
        queue.append(c)
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if parent[y] == -1:
                parent[y] = x
                branch[y] = branch[x]
                queue.append(y)
    return parent, branch


def _total_switch_delta(deg, nbr_sum, metric, p, t, alpha, beta, d_a, d_b, adjacent):
    """Delta of a total switch (r = 0, D_C = 0).

    The adjacent form ``q(D_A - D_C) + (p - r - 1)(D_B - q)`` follows from
    the same edge bookkeeping as the non-adjacent one, with the edge ``uv``
    itself going from weight ``p t`` to ``(p + q)(r + 1)``; tests check it
    against recomputation.
    """
    q = t - 1
    if metric == "m":
        return 2 * q * (p - 1)
    if adjacent:
        return q * d_a + (p - 1) * (d_b - q)
    return q * (alpha - beta) + d_b * (p - 1) + q * d_a


def local_search(
    g: Graph,
    t0: SpanningTree,
    metric: str = "s",
    budget: Optional[int] = None,
    trace: bool = False,
):
    """First-improvement hill climbing over host-feasible total switches.

    Scans ``v`` then ``u`` in increasing id order and applies the first
    strictly improving switch, then rescans.  Stops at a local optimum or
    after ``budget`` moves (default ``10 n^2``).  Returns the tree, or a
    :class:`LocalSearchTrace` when ``trace`` is set.
    """
    metric_value(t0, metric)
    if t0.host != g:
        raise SwitchError("start tree belongs to a different host graph")
    n = g.n
    if budget is None:
        budget = 10 * n * n
    host_adj = [set(a) for a in g.adjacency]
    cur = t0
    values = [metric_value(cur, metric)]
    moves = []
    while len(moves) < budget:
        move = _first_improving(cur, host_adj, metric)
        if move is None:
            break
        u, v, delta = move
        sw = total_switch(cur, u, v)
        cur = apply_switch(cur, sw)
        values.append(values[-1] + delta)
        moves.append((u, v))
    if trace:
        return LocalSearchTrace(cur, values, moves)
    return cur


def _first_improving(t: SpanningTree, host_adj, metric):
    n = t.n
    adj = t.adjacency
    deg = t.degrees
    nbr_sum = [sum(deg[y] for y in adj[x]) for x in range(n)]
    for v in range(n):
        tv = deg[v]
        if tv < 2:
            continue
        parent, branch = _rooted(adj, v)
        vset = adj[v]
        for u in range(n):
            if u == v:
                continue
            v_minus = branch[u]
            B = [b for b in vset if b != v_minus]
            hu = host_adj[u]
            if any(b not in hu for b in B):
                continue
            p = deg[u]
            adjacent = v_minus == u
            u_plus = v if adjacent else parent[u]
            alpha = deg[u_plus]
            d_a = nbr_sum[u] - alpha
            d_b = nbr_sum[v] - deg[v_minus]
            delta = _total_switch_delta(deg, nbr_sum, metric, p, tv, alpha, deg[v_minus], d_a, d_b, adjacent)
            if delta > 0:
                return u, v, delta
    return None
