"""Graph families: classic shapes, seeded random models, coronas, the
``G_omega`` / ``H_omega`` split family and 3-dimensional-matching gadgets.

Random families draw from ``numpy.random.Generator(PCG64(seed))``; for a
fixed integer seed the edge list is reproducible across runs and platforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Optional

import numpy as np

from .graph import Graph, build_graph, is_connected

__all__ = [
    "GenSpec",
    "ThreeDMInstance",
    "DisconnectedGadgetWarning",
    "make_rng",
    "path",
    "cycle",
    "star",
    "double_star",
    "complete",
    "complete_bipartite",
    "grid",
    "wheel",
    "prism",
    "petersen",
    "edgeless",
    "gen_classic",
    "erdos_renyi",
    "preferential_attachment",
    "random_split",
    "random_threshold",
    "gen_random",
    "corona",
    "gen_gomega",
    "gen_3dm_gadget",
    "has_perfect_matching",
    "generate",
    "FAMILIES",
]


def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# -- classic families ----------------------------------------------------------

def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


def edgeless(n: int) -> Graph:
    _require(n >= 0, "n must be nonnegative")
    return build_graph(n, [])


def path(n: int) -> Graph:
    _require(n >= 1, "path needs n >= 1")
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    _require(n >= 3, "cycle needs n >= 3")
    return build_graph(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])


def star(leaves: int) -> Graph:
    """K_{1,leaves} with center 0."""
    _require(leaves >= 1, "star needs at least one leaf")
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def double_star(a: int, b: int) -> Graph:
    """S_{a,b}: centers 0 and 1, leaves of 0 are 2..a+1, leaves of 1 follow."""
    _require(a >= 1 and b >= 1, "double star needs a, b >= 1")
    edges = [(0, 1)]
    edges += [(0, 2 + i) for i in range(a)]
    edges += [(1, 2 + a + j) for j in range(b)]
    return build_graph(a + b + 2, edges)


def complete(n: int) -> Graph:
    _require(n >= 1, "complete graph needs n >= 1")
    return build_graph(n, list(combinations(range(n), 2)))


def complete_bipartite(a: int, b: int) -> Graph:
    _require(a >= 1 and b >= 1, "complete bipartite needs a, b >= 1")
    return build_graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def grid(rows: int, cols: int) -> Graph:
    """Cartesian product P_rows x P_cols, row-major numbering."""
    _require(rows >= 1 and cols >= 1, "grid needs positive dimensions")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return build_graph(rows * cols, edges)


def wheel(k: int) -> Graph:
    """Hub 0 joined to the rim cycle 1..k."""
    _require(k >= 3, "wheel needs a rim of at least 3 vertices")
    rim = [(i, i + 1) for i in range(1, k)] + [(1, k)]
    return build_graph(k + 1, [(0, i) for i in range(1, k + 1)] + rim)


def prism(k: int = 3) -> Graph:
    """Circular ladder C_k x K_2 (the 3-prism for k = 3)."""
    _require(k >= 3, "prism needs k >= 3")
    edges = []
    for i in range(k):
        j = (i + 1) % k
        edges.append((i, j))
        edges.append((k + i, k + j))
        edges.append((i, k + i))
    return build_graph(2 * k, edges)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(10, outer + spokes + inner)


_CLASSIC = {
    "path": path,
    "cycle": cycle,
    "star": star,
    "double_star": double_star,
    "complete": complete,
    "complete_bipartite": complete_bipartite,
    "grid": grid,
    "wheel": wheel,
    "prism": prism,
    "petersen": petersen,
    "edgeless": edgeless,
}


def gen_classic(kind: str, *params: int) -> Graph:
    try:
        fn = _CLASSIC[kind]
    except KeyError:
        raise ValueError(f"unknown classic family {kind!r}") from None
    return fn(*params)


# -- random families -----------------------------------------------------------

def erdos_renyi(n: int, p: float, seed: Optional[int] = None) -> Graph:
    """G(n, p): one uniform draw per pair, pairs in lexicographic order."""
    _require(n >= 2, "erdos_renyi needs n >= 2")
    _require(0.0 <= p <= 1.0, f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    pairs = list(combinations(range(n), 2))
    draws = rng.random(len(pairs))
    return build_graph(n, [pr for pr, x in zip(pairs, draws) if x < p])


def preferential_attachment(n: int, k: int, seed: Optional[int] = None) -> Graph:
    """Barabasi-Albert style growth from a (k+1)-clique.

    Each new vertex picks ``k`` distinct existing vertices, sampled without
    replacement with probability proportional to current degree.
    """
    _require(k >= 1, "attachment count must be >= 1")
    _require(n >= k + 1, f"need n >= k + 1 = {k + 1}")
    rng = make_rng(seed)
    edges = list(combinations(range(k + 1), 2))
    deg = np.zeros(n, dtype=np.int64)
    deg[: k + 1] = k
    for v in range(k + 1, n):
        weights = deg[:v] / deg[:v].sum()
        targets = rng.choice(v, size=k, replace=False, p=weights)
        for u in sorted(int(t) for t in targets):
            edges.append((u, v))
            deg[u] += 1
        deg[v] = k
    return build_graph(n, edges)


def random_split(
    n: int,
    clique_size: Optional[int] = None,
    p: float = 0.5,
    seed: Optional[int] = None,
) -> Graph:
    """Clique on ``0..k-1`` plus an independent set; each independent vertex
    joins each clique vertex with probability ``p`` and at least one, so the
    result is connected."""
    _require(n >= 2, "random_split needs n >= 2")
    _require(0.0 <= p <= 1.0, f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    if clique_size is None:
        clique_size = int(rng.integers(1, n + 1))
    k = clique_size
    _require(1 <= k <= n, f"clique size must lie in [1, {n}]")
    edges = list(combinations(range(k), 2))
    for v in range(k, n):
        nbrs = [u for u in range(k) if rng.random() < p]
        if not nbrs:
            nbrs = [int(rng.integers(0, k))]
        edges.extend((u, v) for u in nbrs)
    return build_graph(n, edges)


def random_threshold(n: int, p: float = 0.5, seed: Optional[int] = None) -> Graph:
    """Threshold graph grown one vertex at a time: vertex ``v`` is joined to
    all of ``0..v-1`` with probability ``p`` and isolated otherwise.  The last
    vertex is always dominating, so the result is connected."""
    _require(n >= 1, "random_threshold needs n >= 1")
    _require(0.0 <= p <= 1.0, f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    edges = []
    for v in range(1, n):
        if v == n - 1 or rng.random() < p:
            edges.extend((u, v) for u in range(v))
    return build_graph(n, edges)


def gen_random(kind: str, seed: Optional[int] = None, **params) -> Graph:
    if kind == "erdos_renyi":
        return erdos_renyi(params["n"], params["p"], seed)
    if kind == "preferential_attachment":
        return preferential_attachment(params["n"], params["k"], seed)
    if kind == "random_split":
        return random_split(params["n"], params.get("clique_size"), params.get("p", 0.5), seed)
    if kind == "random_threshold":
        return random_threshold(params["n"], params.get("p", 0.5), seed)
    raise ValueError(f"unknown random family {kind!r}")


# -- constructions -----------------------------------------------------------

def corona(g1: Graph, g2: Graph) -> Graph:
    """G1 o G2: copy ``i`` of ``g2`` occupies ``n1 + i*n2 ..`` and every
    vertex of it is joined to vertex ``i`` of ``g1``."""
    _require(g1.n >= 1, "corona needs a nonempty first graph")
    n1, n2 = g1.n, g2.n
    edges = list(g1.edges)
    for i in range(n1):
        base = n1 + i * n2
        edges.extend((base + u, base + v) for u, v in g2.edges)
        edges.extend((i, base + j) for j in range(n2))
    return build_graph(n1 + n1 * n2, edges)


def gen_gomega(omega: int, variant: str = "G") -> Graph:
    """Split graph G_omega (or H_omega) of order 3*omega - 2.

    Clique ``c_1..c_omega`` is ``0..omega-1``; ``b_1..b_{2omega-2}`` are
    ``omega..3omega-3``.  ``c_i ~ b_i, b_{i+omega-1}`` for ``i < omega`` and,
    in G only, ``c_omega ~ b_omega..b_{2omega-2}``.
    """
    _require(omega >= 4, "G_omega is defined for omega >= 4")
    _require(variant in ("G", "H"), "variant must be 'G' or 'H'")
    c = lambda i: i - 1  # noqa: E731
    b = lambda i: omega + i - 1  # noqa: E731
    edges = list(combinations(range(omega), 2))
    for i in range(1, omega):
        edges.append((c(i), b(i)))
        edges.append((c(i), b(i + omega - 1)))
    if variant == "G":
        edges.extend((c(omega), b(j)) for j in range(omega, 2 * omega - 1))
    return build_graph(3 * omega - 2, edges)


@dataclass(frozen=True)
class ThreeDMInstance:
    n: int
    triples: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("3-DM instance needs n >= 1")
        trip = tuple(tuple(int(x) for x in t) for t in self.triples)
        for t in trip:
            if len(t) != 3 or not all(0 <= x < self.n for x in t):
                raise ValueError(f"bad triple {t} for n={self.n}")
        if len(set(trip)) != len(trip):
            raise ValueError("duplicate triple")
        object.__setattr__(self, "triples", trip)

    @property
    def m(self) -> int:
        return len(self.triples)


class DisconnectedGadgetWarning(UserWarning):
    """The gadget graph is disconnected, so the instance has no perfect matching."""


def gen_3dm_gadget(inst: ThreeDMInstance, split: bool = False) -> Graph:
    """Root ``0``, triple vertices ``1..m``, then X, Y, Z blocks of size n.

    Root joins every triple vertex; a triple vertex joins its three
    elements.  ``split=True`` also makes the triple vertices a clique.
    """
    n, m = inst.n, inst.m
    x0, y0, z0 = m + 1, m + 1 + n, m + 1 + 2 * n
    edges = [(0, a) for a in range(1, m + 1)]
    if split:
        edges.extend(combinations(range(1, m + 1), 2))
    for a, (x, y, z) in enumerate(inst.triples, start=1):
        edges.extend([(a, x0 + x), (a, y0 + y), (a, z0 + z)])
    g = build_graph(3 * n + m + 1, edges)
    if not is_connected(g):
        warnings.warn(
            "3-DM gadget is disconnected: some element lies in no triple",
            DisconnectedGadgetWarning,
            stacklevel=2,
        )
    return g


def has_perfect_matching(inst: ThreeDMInstance) -> bool:
    """Brute force over n-subsets of triples (test-scale instances only)."""
    for chosen in combinations(inst.triples, inst.n):
        if all(len({t[c] for t in chosen}) == inst.n for c in range(3)):
            return True
    return False


# -- GenSpec dispatch -------------------------------------------------------------

FAMILIES = (
    "path", "cycle", "star", "double_star", "complete", "complete_bipartite",
    "grid", "wheel", "prism", "petersen", "edgeless",
    "erdos_renyi", "preferential_attachment", "random_split", "random_threshold",
    "gomega", "homega", "corona_complete", "gadget_3dm",
)


@dataclass(frozen=True)
class GenSpec:
    """Family tag, parameters and seed for one generated graph.

    ``p`` may be a number or the string ``"4.25/n"`` (any ``"c/n"``).
    """

    family: str
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GenSpec":
        d = dict(d)
        family = d.pop("family")
        seed = d.pop("seed", None)
        params = d.pop("params", {})
        params.update(d)
        return cls(family, params, seed)


def _resolve_p(p, n):
    if isinstance(p, str):
        if p.endswith("/n"):
            return float(p[:-2]) / n
        return float(p)
    return float(p)


def generate(spec: GenSpec) -> Graph:
    f, p = spec.family, spec.params
    if f in ("path", "cycle", "complete", "edgeless"):
        return gen_classic(f, p["n"])
    if f == "star":
        return star(p.get("leaves", p.get("n", 1) - 1))
    if f == "double_star":
        return double_star(p["a"], p["b"])
    if f == "complete_bipartite":
        return complete_bipartite(p["a"], p["b"])
    if f == "grid":
        return grid(p["rows"], p["cols"])
    if f == "wheel":
        return wheel(p["k"])
    if f == "prism":
        return prism(p.get("k", 3))
    if f == "petersen":
        return petersen()
    if f == "erdos_renyi":
        return erdos_renyi(p["n"], _resolve_p(p.get("p", "4.25/n"), p["n"]), spec.seed)
    if f == "preferential_attachment":
        return preferential_attachment(p["n"], p.get("k", 2), spec.seed)
    if f == "random_split":
        return random_split(p["n"], p.get("clique_size"), float(p.get("p", 0.5)), spec.seed)
    if f == "random_threshold":
        return random_threshold(p["n"], float(p.get("p", 0.5)), spec.seed)
    if f in ("gomega", "homega"):
        return gen_gomega(p["omega"], "G" if f == "gomega" else "H")
    if f == "corona_complete":
        return corona(complete(p["omega"]), edgeless(p["t"]))
    if f == "gadget_3dm":
        inst = ThreeDMInstance(p["n"], tuple(tuple(t) for t in p["triples"]))
        return gen_3dm_gadget(inst, bool(p.get("split", False)))
    raise ValueError(f"unhandled family {f!r}")  # pragma: no cover
