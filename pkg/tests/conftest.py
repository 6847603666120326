import networkx as nx
import pytest

from sftree.generators import (
    complete,
    complete_bipartite,
    corona,
    cycle,
    double_star,
    edgeless,
    erdos_renyi,
    gen_gomega,
    grid,
    make_rng,
    path,
    petersen,
    prism,
    star,
    wheel,
)
from sftree.graph import is_connected


def to_nx(g) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def random_connected(n, seed, p=0.5):
    """Seeded connected G(n, p) by redrawing."""
    rng = make_rng(seed)
    while True:
        g = erdos_renyi(n, p, int(rng.integers(2**31)))
        if is_connected(g):
            return g


def small_corpus():
    """Named connected hosts with at most ten vertices."""
    named = {
        "P5": path(5),
        "C6": cycle(6),
        "K4": complete(4),
        "K5": complete(5),
        "K33": complete_bipartite(3, 3),
        "K24": complete_bipartite(2, 4),
        "star6": star(6),
        "S22": double_star(2, 2),
        "W6": wheel(6),
        "prism": prism(3),
        "grid33": grid(3, 3),
        "petersen": petersen(),
        "net": corona(complete(3), edgeless(1)),
        "G4": gen_gomega(4, "G"),
        "H4": gen_gomega(4, "H"),
    }
    for i in range(10):
        named[f"er{i}"] = random_connected(6 + i % 5, 1000 + i, 0.45)
    return named


@pytest.fixture(scope="session")
def corpus():
    return small_corpus()
