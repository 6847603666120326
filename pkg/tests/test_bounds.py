from fractions import Fraction

import pytest

from sftree.bounds import (
    cubic_checks,
    double_star_tau2,
    graph_dimension_bounds,
    is_path,
    is_star,
    split_structure_check,
    split_tau2_bounds,
    threshold_solve,
    tree_bounds,
)
from sftree.errors import PreconditionError
from sftree.exact import enumerate_labeled_trees, solve_exact
from sftree.generators import (
    complete,
    complete_bipartite,
    corona,
    cycle,
    double_star,
    edgeless,
    gen_gomega,
    path,
    petersen,
    prism,
    random_split,
    random_threshold,
    star,
    wheel,
)
from sftree.graph import m_metric, recognize_split, s_metric, tree_from_pairs, validate_spanning_tree


def whole(g):
    return validate_spanning_tree(g, range(g.m))


class TestTreeBounds:
    def test_examples(self):
        r = tree_bounds(path(6))
        assert r["order_m_lower"].lhs == 18 and r["order_m_lower"].equality
        r = tree_bounds(star(6))
        rec = r["diameter_leaf_s_upper"]
        assert (rec.lhs, rec.rhs, rec.equality) == (36, 36, True)
        r = tree_bounds(double_star(4, 4))
        rec = r["leaf_s_lower"]
        assert (rec.lhs, rec.rhs, rec.holds) == (61, 65, True)

    def test_small_leaf_count_marked(self):
        rec = tree_bounds(path(5))["leaf_s_lower"]
        assert not rec.applicable and "8 leaves" in rec.precondition

    def test_rejects_non_trees(self):
        with pytest.raises(PreconditionError):
            tree_bounds(cycle(4))
        with pytest.raises(PreconditionError):
            tree_bounds(path(2))

    @pytest.mark.parametrize("n", range(3, 8))
    def test_all_labeled_trees(self, n):
        for t in enumerate_labeled_trees(n):
            r = tree_bounds(t)
            assert r.all_hold and r.characterizations_ok, r.failures()
            # independent restatement of the m/s relation with rationals
            assert Fraction(m_metric(t)) <= Fraction(n, n - 1) * s_metric(t)

    def test_path_star_predicates(self):
        assert is_path(whole(path(4))) and not is_star(whole(path(4)))
        assert is_star(whole(star(4))) and not is_path(whole(star(4)))
        assert is_path(whole(path(3))) and is_star(whole(path(3)))

    def test_report_serializes(self):
        d = tree_bounds(path(5)).to_dict()
        assert d["inputs"]["leaves"] == 2 and len(d["records"]) >= 10


class TestDimensionBounds:
    def test_examples(self):
        r = graph_dimension_bounds(cycle(7), {"tau2": solve_exact(cycle(7)).optimum})
        assert r["tau2_lower"].lhs == 20 and r["tau2_lower"].equality and r.characterizations_ok
        w = wheel(5)
        r = graph_dimension_bounds(w, {"tau2": solve_exact(w).optimum})
        assert r["tau2_upper"].lhs == 25 and r["tau2_upper"].equality and r.characterizations_ok
        r = graph_dimension_bounds(path(3), {"tau1": 6, "tau2": 4})
        assert all(rec.equality for rec in r.records) and r.characterizations_ok

    def test_characterization_on_corpus(self, corpus):
        for g in corpus.values():
            tau = {"tau1": solve_exact(g, "m").optimum, "tau2": solve_exact(g, "s").optimum}
            r = graph_dimension_bounds(g, tau)
            assert r.all_hold and r.characterizations_ok, r.failures()

    def test_heuristic_provenance(self):
        w = wheel(6)
        r = graph_dimension_bounds(w, {"tau2": (20, "heuristic2")})
        assert r["tau2_upper"].characterization_expected is None
        assert "heuristic2" in r["tau2_upper"].detail
        assert not r["tau1_lower"].applicable


class TestCubic:
    @pytest.mark.parametrize("g,tau2", [(complete(4), 9), (complete_bipartite(3, 3), 21), (prism(3), 21), (petersen(), 45)])
    def test_hosts(self, g, tau2):
        r = cubic_checks(g)
        assert r.all_hold and r.characterizations_ok
        assert r.inputs["tau2"] == tau2

    def test_rejects_non_cubic(self):
        with pytest.raises(PreconditionError):
            cubic_checks(cycle(5))

    def test_identity_formula(self):
        r = cubic_checks(complete(4))
        assert r["m_leaf_identity"].lhs == r["m_leaf_identity"].rhs == 16
        assert r["tau2_upper"].rhs == 9


class TestSplit:
    def test_net_graph(self):
        net = corona(complete(3), edgeless(1))
        assert split_tau2_bounds(net) == (16, 19)
        res = solve_exact(net, keep_all=True)
        assert res.optimum == 19
        for t in res.optimal_trees:
            assert split_structure_check(net, t).all_hold

    def test_gomega(self):
        g = gen_gomega(4, "G")
        assert split_tau2_bounds(g) == (42, 81)
        res = solve_exact(g, keep_all=True)
        for t in res.optimal_trees:
            rep = split_structure_check(g, t)
            assert rep.all_hold and rep.inputs["source"] == 3

    def test_internal_independent_vertex_is_flagged(self):
        g = gen_gomega(4, "G")
        part = recognize_split(g)
        # b_4 (vertex 7) joins c_1 and c_4 and is made internal
        bad = tree_from_pairs(g, [(0, 7), (7, 3), (0, 1), (1, 2), (0, 4), (1, 5), (2, 6), (3, 8), (3, 9)])
        rep = split_structure_check(g, bad)
        assert 7 in part.I
        assert not rep["independent_are_leaves"].holds and not rep.all_hold

    def test_threshold_graphs(self):
        for seed in range(20):
            g = random_threshold(6 + seed % 4, 0.5, seed)
            lo, hi = split_tau2_bounds(g)
            assert lo == hi == (g.n - 1) ** 2

    def test_corona_attains_upper_bound(self):
        for omega, t in [(3, 1), (3, 2), (4, 1)]:
            g = corona(complete(omega), edgeless(t))
            delta = omega + t - 1
            want = (delta - omega + 2) * (g.n + delta * (omega - 1) - 1) - delta
            assert split_tau2_bounds(g)[1] == want == solve_exact(g).optimum

    def test_p4_attains_lower_bound(self):
        assert split_tau2_bounds(path(4))[0] == 8 == solve_exact(path(4)).optimum

    def test_random_brackets_including_small_cliques(self):
        for seed in range(60):
            g = random_split(5 + seed % 5, 1 + seed % 4, 0.5, seed)
            lo, hi = split_tau2_bounds(g)
            assert lo <= solve_exact(g).optimum <= hi

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            split_tau2_bounds(cycle(5))
        with pytest.raises(PreconditionError):
            split_structure_check(star(4), whole(star(4)))


class TestPolynomialCases:
    def test_threshold_solve(self):
        r = threshold_solve(star(7))
        assert r.optimum == 49 and max(r.tree.degrees) == 7
        assert threshold_solve(complete(5)).optimum == 16
        assert threshold_solve(complete(5), "m").optimum == 20
        with pytest.raises(PreconditionError):
            threshold_solve(path(4))

    def test_threshold_matches_exact(self):
        for seed in range(15):
            g = random_threshold(7, 0.4, seed)
            r = threshold_solve(g)
            assert r.optimum == solve_exact(g).optimum == s_metric(r.tree)

    def test_double_star(self):
        assert double_star_tau2(2, 2) == 21
        assert double_star_tau2(1, 1) == 8 == s_metric(path(4))
        assert double_star_tau2(3, 1) == 22 == s_metric(double_star(3, 1))
        with pytest.raises(ValueError):
            double_star_tau2(0, 2)
