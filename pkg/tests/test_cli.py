import csv
import io
import json
import subprocess
import sys

import pytest

from sftree.cli import BENCH_COLUMNS, main, run_bench
from sftree.generators import complete, cycle, gen_gomega, path
from sftree.graph import format_graph, read_graph


def write(tmp_path, name, g):
    p = tmp_path / name
    p.write_text(format_graph(g))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGenerate:
    def test_gomega(self, capsys):
        code, out, _ = run(capsys, "generate", "--family", "gomega", "--omega", "4")
        assert code == 0 and out.splitlines()[0].split()[0] == "10"

    def test_round_trip(self, tmp_path, capsys):
        out = tmp_path / "er.txt"
        assert run(capsys, "--seed", "3", "generate", "--family", "erdos_renyi", "--n", "15", "--out", str(out))[0] == 0
        again = tmp_path / "er2.txt"
        run(capsys, "--seed", "3", "generate", "--family", "erdos_renyi", "--n", "15", "--out", str(again))
        assert read_graph(out) == read_graph(again)

    def test_gadget_and_batch(self, tmp_path, capsys):
        code, out, _ = run(capsys, "generate", "--family", "gadget_3dm", "--n", "1", "--triples", "0,0,0")
        assert code == 0 and out.startswith("5 ")
        spec = tmp_path / "batch.json"
        spec.write_text(json.dumps([{"family": "wheel", "k": [4, 5]}, {"family": "random_split", "n": 8, "count": 2}]))
        code, out, _ = run(capsys, "--seed", "1", "generate", "--spec", str(spec), "--out", str(tmp_path / "g"))
        assert code == 0 and len(json.loads(out)["written"]) == 4

    def test_bad_param(self, capsys):
        code, _, err = run(capsys, "generate", "--family", "cycle", "--n", "2")
        assert code == 2 and "error" in err


class TestSolve:
    def test_exact_c5(self, tmp_path, capsys):
        code, out, _ = run(capsys, "solve", write(tmp_path, "c5.txt", cycle(5)), "--method", "exact")
        data = json.loads(out)
        assert code == 0 and data["value"] == 12 and data["status"] == "optimal" and len(data["edges"]) == 4

    @pytest.mark.parametrize("method", ["heuristic1", "heuristic2", "local-search"])
    def test_heuristics(self, tmp_path, capsys, method):
        code, out, _ = run(capsys, "solve", write(tmp_path, "g.txt", gen_gomega(4)), "--method", method)
        data = json.loads(out)
        assert code == 0 and data["status"] == "heuristic" and 0 < data["value"] <= 60

    def test_ilp_emit(self, tmp_path, capsys):
        gp = write(tmp_path, "tri.txt", cycle(3))
        code, out, _ = run(capsys, "solve", gp, "--method", "ilp-emit")
        lp = json.loads(out)["model"]
        text = open(lp).read()
        assert code == 0 and text.count("Maximize") == 1
        code, out, _ = run(capsys, "solve", gp, "--method", "ilp-solve", "--emit-only", "--out", str(tmp_path / "x.lp"))
        assert code == 0 and (tmp_path / "x.lp").exists()

    def test_ilp_solve_csv(self, tmp_path, capsys):
        code, out, _ = run(capsys, "--format", "csv", "solve", write(tmp_path, "k4.txt", complete(4)),
                           "--method", "ilp-solve", "--formulation", "martin")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0 and rows[1][2] == "9"

    def test_exit_codes(self, tmp_path, capsys):
        dis = tmp_path / "dis.txt"
        dis.write_text("4 2\n0 1\n2 3\n")
        assert run(capsys, "solve", str(dis))[0] == 3
        bad = tmp_path / "bad.txt"
        bad.write_text("3 1\n0 0\n")
        assert run(capsys, "solve", str(bad))[0] == 2
        assert run(capsys, "solve", str(tmp_path / "missing.txt"))[0] == 2
        k6 = write(tmp_path, "k6.txt", complete(6))
        assert run(capsys, "solve", k6, "--cap", "10")[0] == 3
        assert run(capsys, "solve", k6, "--method", "ilp-solve", "--solver-cmd", "no-such-solver {model}")[0] == 4
        from sftree.generators import grid

        g = write(tmp_path, "grid.txt", grid(5, 5))
        assert run(capsys, "solve", g, "--cap", "10000000000000", "--timeout", "0.05")[0] == 5


class TestBounds:
    def test_tree_file(self, tmp_path, capsys):
        code, out, _ = run(capsys, "bounds", write(tmp_path, "p6.txt", path(6)))
        rep = json.loads(out)
        assert code == 0 and rep["kind"] == "tree"
        names = {r["name"]: r for r in rep["tree_bounds"]["records"]}
        assert names["order_m_lower"]["equality"] is True

    def test_graphs(self, tmp_path, capsys):
        files = [write(tmp_path, "k4.txt", complete(4)), write(tmp_path, "g4.txt", gen_gomega(4))]
        code, out, _ = run(capsys, "bounds", *files)
        reps = json.loads(out)
        assert code == 0 and "cubic" in reps[0]
        assert reps[1]["split"]["lo"] == 42 and reps[1]["split"]["bracketed"] is True
        assert reps[1]["split"]["case"] == "omega>=3"
        code, out, _ = run(capsys, "--format", "csv", "bounds", *files)
        assert out.splitlines()[0].startswith("graph,section,name")


class TestBench:
    def test_row_count_and_schema(self, tmp_path, capsys):
        spec = tmp_path / "s.json"
        spec.write_text(json.dumps({"graphs": [{"family": "erdos_renyi", "n": [6, 7], "p": "4.25/n", "count": 3},
                                               {"family": "grid", "rows": 3, "cols": 3}]}))
        code, out, _ = run(capsys, "--seed", "5", "bench", str(spec), "--methods", "exact,heuristic1")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and list(rows[0]) == BENCH_COLUMNS and len(rows) == 14
        keys = [(r["graph_id"], r["method"]) for r in rows]
        assert keys == sorted(keys)
        for r in rows:
            assert r["status"] in ("optimal", "heuristic")
            assert float(r["alpha"]) >= 1
        code, again, _ = run(capsys, "--seed", "5", "bench", str(spec), "--methods", "exact,heuristic1")
        strip = lambda text: [r[:7] for r in csv.reader(io.StringIO(text))]
        assert strip(out) == strip(again)

    def test_alpha_empty_without_exact(self):
        recs = run_bench([{"family": "grid", "rows": 3, "cols": 3}], ["heuristic1", "heuristic2"])
        assert all(r.alpha is None for r in recs) and all(r.row()[6] == "" for r in recs)

    def test_refused_and_timeout_rows(self):
        recs = run_bench([{"family": "complete", "n": 9}], ["exact"], cap=1000)
        assert recs[0].status == "refused" and recs[0].value is None
        recs = run_bench([{"family": "grid", "rows": 5, "cols": 5}], ["exact"], cap=None, timeout=0.05)
        assert recs[0].status == "timeout"

    def test_worker_pool_matches_serial(self):
        entries = [{"family": "erdos_renyi", "n": 8, "count": 4}]
        a = run_bench(entries, ["exact", "heuristic2"], seed=2, threads=1)
        b = run_bench(entries, ["exact", "heuristic2"], seed=2, threads=2)
        assert [r.row()[:7] for r in a] == [r.row()[:7] for r in b]


class TestEpi:
    def test_fixture_pipeline(self, tmp_path, capsys):
        fa = tmp_path / "o.fa"
        assert run(capsys, "epi", "--write-fixture", str(fa))[0] == 0
        code, out, _ = run(capsys, "epi", str(fa), "--json", str(tmp_path / "r.json"), "--csv", str(tmp_path / "r.csv"))
        report = json.loads(out)
        assert code == 0 and report[0]["superspreader"] == "P0"
        assert json.loads((tmp_path / "r.json").read_text()) == report
        assert (tmp_path / "r.csv").read_text().splitlines()[1].endswith(",P0")

    def test_bad_fasta(self, tmp_path, capsys):
        fa = tmp_path / "bad.fa"
        fa.write_text(">a|0\nACGT\n>b|0\nACG\n")
        assert run(capsys, "epi", str(fa))[0] == 2


def test_console_script(tmp_path):
    gp = write(tmp_path, "k4.txt", complete(4))
    proc = subprocess.run([sys.executable, "-m", "sftree.cli", "solve", gp], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == 9
