from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_connected, to_nx
from sftree.errors import DisconnectedGraphError, GraphInputError, TreeValidationError
from sftree.exact import enumerate_labeled_trees
from sftree.generators import (
    complete,
    corona,
    cycle,
    double_star,
    edgeless,
    erdos_renyi,
    path,
    random_split,
    random_threshold,
    star,
)
from sftree.graph import (
    TrailCounts,
    build_graph,
    connected_components,
    format_graph,
    m_metric,
    metrics_from_trails,
    parse_graph,
    read_graph,
    recognize_split,
    recognize_threshold,
    require_connected,
    s_metric,
    trail_counts,
    tree_stats,
    validate_spanning_tree,
    write_graph,
)


def brute_trails(g):
    """Count trails with 1, 2, 3 edges by listing edge sequences without a
    repeated edge and halving (each trail is read in two directions)."""
    inc = [[] for _ in range(g.n)]
    for e, (u, v) in enumerate(g.edges):
        inc[u].append((e, v))
        inc[v].append((e, u))
    counts = [0, 0, 0]

    def walk(x, used, depth):
        if depth:
            counts[depth - 1] += 1
        if depth == 3:
            return
        for e, y in inc[x]:
            if e not in used:
                walk(y, used | {e}, depth + 1)

    for v in range(g.n):
        walk(v, frozenset(), 0)
    return tuple(c // 2 for c in counts)


graphs = st.integers(1, 9).flatmap(
    lambda n: st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])
                      .map(lambda p: tuple(sorted(p))), max_size=n * (n - 1) // 2).map(lambda es: build_graph(n, es))
)


class TestBuild:
    def test_triangle(self):
        g = build_graph(3, [(0, 1), (1, 2), (0, 2)])
        assert g.m == 3 and g.degrees == (2, 2, 2)

    def test_path_ids_in_input_order(self):
        g = build_graph(4, [(2, 3), (1, 0), (1, 2)])
        assert g.edges == ((2, 3), (0, 1), (1, 2))
        assert g.edge_id(3, 2) == 0 and g.adjacency[1] == (0, 2)

    @pytest.mark.parametrize(
        "n,edges,pair",
        [(3, [(0, 1), (1, 0)], (1, 0)), (3, [(1, 1)], (1, 1)), (3, [(0, 3)], (0, 3)), (3, [(-1, 0)], (-1, 0))],
    )
    def test_rejections_name_the_pair(self, n, edges, pair):
        with pytest.raises(GraphInputError) as info:
            build_graph(n, edges)
        assert tuple(info.value.pair) == pair

    def test_immutable(self):
        g = path(3)
        with pytest.raises(AttributeError):
            g.n = 5

    def test_text_round_trip(self, tmp_path):
        g = erdos_renyi(12, 0.3, seed=5)
        assert parse_graph(format_graph(g)) == g
        write_graph(g, tmp_path / "g.txt")
        assert read_graph(tmp_path / "g.txt") == g

    def test_reader_normalizes_and_rejects(self):
        assert parse_graph("# comment\n3 2\n1 0\n2 1\n").edges == ((0, 1), (1, 2))
        with pytest.raises(GraphInputError):
            parse_graph("3 2\n0 1\n1 0\n")
        with pytest.raises(GraphInputError):
            parse_graph("3 3\n0 1\n")


class TestMetrics:
    def test_examples(self):
        assert s_metric(path(4)) == 8 and m_metric(path(4)) == 10
        assert s_metric(star(4)) == 16 and m_metric(star(4)) == 20
        assert s_metric(cycle(3)) == 12
        assert m_metric(path(2)) == 2

    def test_trail_examples(self):
        assert trail_counts(cycle(3)) == TrailCounts(3, 3, 3)
        assert trail_counts(path(4)) == TrailCounts(3, 2, 1)
        assert trail_counts(star(3)) == TrailCounts(3, 3, 0)
        assert metrics_from_trails(TrailCounts(3, 3, 3)) == (12, 12)
        assert metrics_from_trails(TrailCounts(3, 2, 1)) == (10, 8)
        assert metrics_from_trails(TrailCounts(0, 0, 0)) == (0, 0)

    @settings(max_examples=150, deadline=None)
    @given(graphs)
    def test_trail_counts_match_walk_enumeration(self, g):
        tc = trail_counts(g)
        assert (tc.gamma1, tc.gamma2, tc.gamma3) == brute_trails(g)
        assert metrics_from_trails(tc) == (m_metric(g), s_metric(g))


class TestTrees:
    def test_validate_examples(self):
        c4 = cycle(4)
        for ids in combinations(range(4), 3):
            t = validate_spanning_tree(c4, ids)
            assert sorted(t.degrees) == [1, 1, 2, 2]
        with pytest.raises(TreeValidationError) as info:
            validate_spanning_tree(c4, range(4))
        assert info.value.kind == "wrong_count"
        k4 = complete(4)
        t = validate_spanning_tree(k4, [k4.edge_id(0, 1), k4.edge_id(2, 3), k4.edge_id(0, 2)])
        assert sum(t.degrees) == 6

    def test_validate_failure_kinds(self):
        k4 = complete(4)
        cyc = [k4.edge_id(0, 1), k4.edge_id(1, 2), k4.edge_id(0, 2)]
        with pytest.raises(TreeValidationError) as info:
            validate_spanning_tree(k4, cyc)
        assert info.value.kind == "cycle"
        with pytest.raises(TreeValidationError) as info:
            validate_spanning_tree(k4, [0, 1, 99])
        assert info.value.kind == "bad_edge"

    def test_validate_matches_networkx_on_all_subsets(self):
        g = random_connected(6, 3, 0.6)
        h = to_nx(g)
        for ids in combinations(range(g.m), g.n - 1):
            sub = nx.Graph()
            sub.add_nodes_from(range(g.n))
            sub.add_edges_from(g.edges[i] for i in ids)
            try:
                validate_spanning_tree(g, ids)
                ok = True
            except TreeValidationError:
                ok = False
            assert ok == nx.is_tree(sub)
        assert h.number_of_nodes() == 6

    def test_stats_examples(self):
        for g, ell, d, p2 in [(path(5), 2, 4, 2), (star(5), 5, 2, 0), (double_star(2, 2), 4, 3, 0)]:
            s = tree_stats(validate_spanning_tree(g, range(g.m)))
            assert (s.leaves, s.diameter, s.pendant_2paths) == (ell, d, p2)

    @pytest.mark.parametrize("n", [3, 5, 6])
    def test_stats_against_networkx_and_degree_identities(self, n):
        for t in enumerate_labeled_trees(n):
            s = tree_stats(t)
            h = nx.Graph(list(t.edges))
            assert s.diameter == nx.diameter(h)
            assert s.leaves == s.count(1) == sum(1 for v in range(n) if t.degrees[v] == 1)
            assert s.pendant_2paths <= s.leaves
            top = sorted(t.degrees, reverse=True)
            assert top[0] + top[1] <= s.leaves + 2


class TestComponents:
    def test_examples(self):
        assert connected_components(build_graph(4, [(0, 1), (2, 3)])) == [[0, 1], [2, 3]]
        assert len(connected_components(cycle(5))) == 1
        assert connected_components(edgeless(3)) == [[0], [1], [2]]
        with pytest.raises(DisconnectedGraphError):
            require_connected(edgeless(2))


def split_oracle(g):
    """Lexicographically smallest maximum clique whose complement is
    independent, by brute force over the maximum cliques."""
    h = to_nx(g)
    cliques = [tuple(sorted(c)) for c in nx.find_cliques(h)]
    omega = max(len(c) for c in cliques)
    best = None
    for c in cliques:
        if len(c) != omega:
            continue
        rest = [v for v in range(g.n) if v not in c]
        if all(not g.has_edge(a, b) for a, b in combinations(rest, 2)):
            best = c if best is None else min(best, c)
    return best


class TestSplit:
    def test_examples(self):
        net = corona(complete(3), edgeless(1))
        p = recognize_split(net)
        assert p.K == (0, 1, 2) and p.I == (3, 4, 5)
        assert recognize_split(cycle(4)) is None
        p = recognize_split(star(4))
        assert p.omega == 2 and len(p.I) == 3

    def test_against_clique_oracle(self):
        seen_split = seen_other = 0
        for seed in range(300):
            n = 2 + seed % 9
            g = random_split(n, None, 0.5, seed) if seed % 2 else erdos_renyi(n, 0.4, seed)
            got = recognize_split(g)
            want = split_oracle(g) if g.m else tuple(range(min(1, n)))
            if want is None:
                assert got is None
                seen_other += 1
            else:
                assert got is not None and got.K == want, (seed, g.edges)
                seen_split += 1
        assert seen_split > 100 and seen_other > 10


class TestThreshold:
    def test_examples(self):
        assert recognize_threshold(star(4)) is not None
        assert recognize_threshold(path(4)) is None
        assert recognize_threshold(complete(4)) is not None

    def test_against_networkx(self):
        from networkx.algorithms.threshold import is_threshold_graph

        for seed in range(200):
            n = 2 + seed % 8
            g = random_threshold(n, 0.5, seed) if seed % 3 == 0 else erdos_renyi(n, 0.5, seed)
            assert (recognize_threshold(g) is not None) == is_threshold_graph(to_nx(g))

    def test_order_is_a_witness(self):
        g = random_threshold(9, 0.4, 11)
        order = recognize_threshold(g)
        alive = set(range(g.n))
        for v in order:
            d = sum(1 for w in g.adjacency[v] if w in alive)
            assert d in (0, len(alive) - 1)
            alive.discard(v)
