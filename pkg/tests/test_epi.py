from fractions import Fraction
from itertools import combinations

import pytest

from sftree.epi import (
    DEFAULT_THRESHOLD,
    PatientSequences,
    SequenceFormatError,
    build_epi_graph,
    component_threshold,
    distance,
    epi_components,
    format_fasta,
    parse_fasta,
    parse_sequences,
    planted_outbreak,
    report_csv,
    report_json,
    transmission_report,
)
from sftree.errors import RefusedError
from sftree.graph import build_graph, is_connected


def P(pid, *seqs):
    return PatientSequences(pid, tuple(seqs))


class TestParse:
    def test_two_patients(self):
        text = ">a|0\nACGTACGT\n>a|1\nACGTACGA\n>b|0\nACGT\nACGT\n>b|1\nTTTTTTTT\n"
        pts = parse_fasta(text)
        assert [p.patient for p in pts] == ["a", "b"] and all(len(p.sequences) == 2 for p in pts)
        assert pts[1].sequences[0] == "ACGTACGT"

    def test_lowercase(self):
        assert parse_fasta(">a|0\nacgtn\n")[0].sequences == ("ACGTN",)

    @pytest.mark.parametrize("text", [
        ">a|0\nACGT\n>b|0\nACG\n",
        ">a|0\nACGX\n",
        ">a|0\n>b|0\nACGT\n",
        "ACGT\n",
        "",
        ">|0\nACGT\n",
    ])
    def test_errors(self, text):
        with pytest.raises(SequenceFormatError):
            parse_fasta(text)

    def test_empty_patient(self):
        with pytest.raises(SequenceFormatError):
            P("x")

    def test_file_round_trip(self, tmp_path):
        pts = planted_outbreak(3)
        (tmp_path / "o.fa").write_text(format_fasta(pts))
        assert parse_sequences(tmp_path / "o.fa") == pts


class TestDistance:
    def test_examples(self):
        assert distance(P("a", "ACGT"), P("b", "ACGT")) == 0
        assert distance(P("a", "AAAAAAAA"), P("b", "AAAAAAAT")) == Fraction(1, 8)
        s3 = "AAAAAAAA"
        s1, s2 = "TTTAAAAA", "TAAAAAAA"
        assert distance(P("x", s1, s2), P("y", s3)) == Fraction(1, 8)

    def test_n_handling(self):
        a, b = P("a", "ANAA"), P("b", "ANAT")
        assert distance(a, b) == Fraction(2, 4)
        assert distance(a, b, ignore_n=True) == Fraction(1, 3)
        assert distance(P("a", "NA"), P("b", "NA")) == Fraction(1, 2)

    def test_symmetric_and_zero_iff_shared(self):
        pts = planted_outbreak(1)
        for a, b in combinations(pts, 2):
            assert distance(a, b) == distance(b, a)
            shared = bool(set(a.sequences) & set(b.sequences))
            assert (distance(a, b) == 0) == shared


class TestGraph:
    def _seqs(self, L, mism):
        base = "A" * L
        return [P("h", base)] + [P(f"p{i}", "T" * k + "A" * (L - k)) for i, k in enumerate(mism)]

    def test_threshold_boundary(self):
        # distances 3/100 and 4/100 from the first patient; 29/800 sits between
        pts = [P("a", "A" * 100), P("b", "T" * 3 + "A" * 97), P("c", "A" * 96 + "G" * 4)]
        g, comps, D = build_epi_graph(pts)
        assert g.edges == ((0, 1),)
        assert D[0][1] == Fraction(3, 100) and D[0][2] == Fraction(4, 100)

    def test_inclusive_boundary(self):
        assert DEFAULT_THRESHOLD == Fraction(29, 800)
        L = 800
        pts = [P("a", "A" * L), P("b", "T" * 29 + "A" * (L - 29))]
        assert build_epi_graph(pts)[0].m == 1
        assert build_epi_graph(pts, Fraction(28, 800))[0].m == 0

    def test_extremes(self):
        pts = [P(str(i), "A" * i + "T" * (6 - i)) for i in range(4)]
        assert build_epi_graph(pts, 0)[0].m == 0
        g = build_epi_graph(pts, 1)[0]
        assert g.m == 6
        with pytest.raises(SequenceFormatError):
            build_epi_graph(pts[:1])


class TestComponentThreshold:
    def test_path_with_chord(self):
        F = Fraction
        sub = [[0, F(1, 100), F(3, 100)], [F(1, 100), 0, F(2, 100)], [F(3, 100), F(2, 100), 0]]
        t, g = component_threshold(sub)
        assert t == F(2, 100) and g.edges == ((0, 1), (1, 2))

    def test_uniform_and_pair(self):
        F = Fraction
        u = [[0 if i == j else F(1, 50) for j in range(4)] for i in range(4)]
        t, g = component_threshold(u)
        assert t == F(1, 50) and g.m == 6
        t, g = component_threshold([[0, F(3, 7)], [F(3, 7), 0]])
        assert t == F(3, 7) and g.m == 1

    def test_minimal_by_brute_force(self):
        import random

        rnd = random.Random(5)
        for _ in range(50):
            k = rnd.randint(2, 7)
            sub = [[Fraction(0)] * k for _ in range(k)]
            for i, j in combinations(range(k), 2):
                sub[i][j] = sub[j][i] = Fraction(rnd.randint(1, 12), 100)
            t, g = component_threshold(sub)
            assert is_connected(g)
            weights = sorted({sub[i][j] for i, j in combinations(range(k), 2)})
            want = next(w for w in weights if is_connected(
                build_graph(k, [(i, j) for i, j in combinations(range(k), 2) if sub[i][j] <= w])))
            assert t == want
            lower = [w for w in weights if w < t]
            if lower:
                cut = build_graph(k, [(i, j) for i, j in combinations(range(k), 2) if sub[i][j] <= lower[-1]])
                assert not is_connected(cut)


class TestReport:
    @pytest.mark.parametrize("solver", ["exact", "heuristic2"])
    def test_planted_hub(self, solver):
        comps = transmission_report(planted_outbreak(0), solver)
        assert len(comps) == 1 and comps[0].superspreader == "P0"
        assert comps[0].t_c == Fraction(5, 264) and comps[0].s_value == 64

    def test_planted_structure(self):
        pts = planted_outbreak(0)
        g, comps, D = build_epi_graph(pts)
        assert D[1][2] == Fraction(4, 264) and D[3][4] == Fraction(6, 264)
        assert all(D[0][i] == Fraction(5, 264) for i in range(1, 9))
        (c,) = epi_components(pts)
        assert c.graph.m == 9  # the 6/264 pair is pruned

    def test_two_patient_component(self):
        pts = [P("b", "AAAA"), P("a", "AAAT")]
        (c,) = transmission_report(pts, "exact", t=Fraction(1, 3))
        assert c.superspreader == "b" and c.tree_edges() == [("a", "b")]

    def test_separate_components(self):
        pts = [P("a", "AAAAAAAAAA"), P("b", "AAAAAAAAAT"), P("c", "CCCCCCCCCC"), P("d", "CCCCCCCCCG")]
        comps = transmission_report(pts, "heuristic2", t=Fraction(1, 10))
        assert [c.members for c in comps] == [["a", "b"], ["c", "d"]]

    def test_refusal_names_alternatives(self):
        pts = [P(f"p{i}", "A" * 20) for i in range(9)]  # K9 after thresholding
        with pytest.raises(RefusedError) as info:
            transmission_report(pts, "exact", cap=1000)
        assert "heuristic2" in str(info.value) and info.value.count == 9**7

    def test_outputs_deterministic(self):
        a = transmission_report(planted_outbreak(0), "exact")
        b = transmission_report(planted_outbreak(0), "exact")
        assert report_json(a) == report_json(b)
        lines = report_csv(a).splitlines()
        assert lines[0] == "component,size,t_C,method,s_value,superspreader"
        assert lines[1] == "0,9,5/264,exact,64,P0"

    def test_unknown_solver(self):
        with pytest.raises(ValueError):
            transmission_report(planted_outbreak(0), "magic")
