"""``sftree`` command line: generate, solve, bounds, bench, epi.

Exit codes: 0 ok, 2 input error, 3 infeasible / refused / disconnected,
4 solver failure, 5 timeout.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

from . import bounds as bnd
from .errors import (
    DisconnectedGraphError,
    GraphInputError,
    PreconditionError,
    RefusedError,
    SFTreeError,
    SolutionMismatchError,
    SolveTimeout,
    SolverError,
    TreeValidationError,
)
from .exact import DEFAULT_CAP, count_spanning_trees, solve_exact
from .generators import DisconnectedGadgetWarning, FAMILIES, GenSpec, generate, make_rng
from .graph import (
    Graph,
    format_graph,
    is_connected,
    m_metric,
    read_graph,
    recognize_split,
    recognize_threshold,
    require_connected,
    s_metric,
)

EXIT_OK, EXIT_INPUT, EXIT_REFUSED, EXIT_SOLVER, EXIT_TIMEOUT = 0, 2, 3, 4, 5

SOLVE_METHODS = ("exact", "heuristic1", "heuristic2", "local-search", "ilp-emit", "ilp-solve")
BENCH_METHODS = ("exact", "heuristic1", "heuristic2", "local-search", "ilp")
BENCH_COLUMNS = ["graph_id", "family", "n", "m", "method", "value", "alpha", "time_ms", "status"]
SOLVER_ENV = "SFTREE_SOLVER_CMD"


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, SolveTimeout):
        return EXIT_TIMEOUT
    if isinstance(exc, (RefusedError, DisconnectedGraphError)):
        return EXIT_REFUSED
    if isinstance(exc, SolutionMismatchError) and "infeasible" in str(exc):
        return EXIT_REFUSED
    if isinstance(exc, SolverError):
        return EXIT_SOLVER
    if isinstance(exc, (GraphInputError, TreeValidationError, PreconditionError, ValueError, OSError)):
        return EXIT_INPUT
    return 1


def _solver_cmd(args) -> str:
    from .milp_adapter import default_command

    return args.solver_cmd or os.environ.get(SOLVER_ENV) or default_command()


def _emit(obj, fmt: str, out=None, csv_rows=None, columns=None):
    """Write ``obj`` as JSON, or ``csv_rows`` under ``columns`` as CSV."""
    if fmt == "csv" and csv_rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(csv_rows)
        text = buf.getvalue()
    else:
        text = json.dumps(obj, indent=2, default=str) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- generate --------------------------------------------------------------------

def _parse_value(text):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    try:
        return json.loads(text)
    except ValueError:
        return text


def _gen_params(args) -> dict:
    params = {}
    for key in ("n", "omega", "t", "k", "rows", "cols", "a", "b", "leaves", "clique_size"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    if args.p is not None:
        params["p"] = _parse_value(args.p)
    if args.triples:
        params["triples"] = [tuple(int(x) for x in t.split(",")) for t in args.triples.split(";") if t]
    if args.split:
        params["split"] = True
    for item in args.param or []:
        key, _, val = item.partition("=")
        params[key] = _parse_value(val)
    return params


def cmd_generate(args) -> int:
    if args.spec:
        with open(args.spec) as fh:
            entries = json.load(fh)
        if isinstance(entries, dict):
            entries = entries.get("graphs", [entries])
        outdir = args.out or "."
        os.makedirs(outdir, exist_ok=True)
        written = []
        for item in _expand_batch(entries, args.seed):
            path = os.path.join(outdir, f"{item['graph_id']}.txt")
            with open(path, "w") as fh:
                fh.write(format_graph(item["graph"]))
            written.append(path)
        _emit({"written": written}, "json")
        return EXIT_OK
    if not args.family:
        raise GraphInputError("generate needs --family or --spec")
    spec = GenSpec(args.family, _gen_params(args), args.seed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DisconnectedGadgetWarning)
        g = generate(spec)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    text = format_graph(g)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- solve -------------------------------------------------------------------------

def _tree_payload(method, metric, tree, status, **extra):
    payload = {
        "method": method,
        "metric": metric,
        "value": s_metric(tree) if metric == "s" else m_metric(tree),
        "s": s_metric(tree),
        "m": m_metric(tree),
        "status": status,
        "edges": [list(e) for e in sorted(tree.edges)],
    }
    payload.update(extra)
    return payload


def cmd_solve(args) -> int:
    g = read_graph(args.graph)
    metric = args.metric
    if args.method == "ilp-emit" or (args.method == "ilp-solve" and args.emit_only):
        from .ilp import build_model, emit_lp

        require_connected(g)
        model = build_model(g, args.formulation, metric)
        out = args.out or os.path.splitext(args.graph)[0] + f".{args.formulation}.lp"
        with open(out, "w") as fh:
            fh.write(emit_lp(model))
        _emit({"method": "ilp-emit", "model": out, "variables": len(model.variables),
               "constraints": len(model.constraints)}, "json")
        return EXIT_OK
    require_connected(g)
    start = time.perf_counter()
    if args.method == "exact":
        res = solve_exact(g, metric, cap=args.cap, timeout_s=args.timeout)
        tree, status, extra = res.tree, "optimal", {"optimal_trees": res.n_optimal, "examined": res.examined}
    elif args.method in ("heuristic1", "heuristic2"):
        from .heuristics import heuristic1, heuristic2

        tree = (heuristic1 if args.method == "heuristic1" else heuristic2)(g)
        status, extra = "heuristic", {}
    elif args.method == "local-search":
        from .heuristics import heuristic1, heuristic2
        from .transforms import local_search

        start_tree = (heuristic1 if args.start == "heuristic1" else heuristic2)(g)
        trace = local_search(g, start_tree, metric, trace=True)
        tree, status, extra = trace.tree, "heuristic", {"start": args.start, "moves": len(trace.moves)}
    else:
        from .ilp import build_model, extract_tree, run_external_solver

        model = build_model(g, args.formulation, metric)
        assignment = run_external_solver(model, _solver_cmd(args), args.timeout)
        tree = extract_tree(g, assignment, metric)
        status = "optimal" if assignment.status in (None, "optimal") else assignment.status
        extra = {"formulation": args.formulation}
    extra["time_ms"] = round(1000 * (time.perf_counter() - start), 3)
    payload = _tree_payload(args.method, metric, tree, status, **extra)
    rows = [[payload["method"], metric, payload["value"], payload["s"], payload["m"], status,
             " ".join(f"{u}-{v}" for u, v in payload["edges"])]]
    _emit(payload, args.format, args.out, rows, ["method", "metric", "value", "s", "m", "status", "edges"])
    return EXIT_OK


# -- bounds ----------------------------------------------------------------------

def _is_tree_graph(g: Graph) -> bool:
    return g.m == g.n - 1 and is_connected(g)


def bounds_for_graph(g: Graph, cap: int = DEFAULT_CAP) -> dict:
    """Every applicable report for one input graph, as plain data."""
    out: dict = {"n": g.n, "m": g.m, "max_degree": g.max_degree}
    if _is_tree_graph(g):
        out["kind"] = "tree"
        if g.n >= 3:
            out["tree_bounds"] = bnd.tree_bounds(g).to_dict()
        return out
    require_connected(g)
    out["kind"] = "graph"
    if count_spanning_trees(g) <= cap:
        tau = {"tau1": (solve_exact(g, "m", cap=cap).optimum, "exact"),
               "tau2": (solve_exact(g, "s", cap=cap).optimum, "exact")}
    else:
        from .heuristics import heuristic2

        t = heuristic2(g)
        tau = {"tau1": (m_metric(t), "heuristic2"), "tau2": (s_metric(t), "heuristic2")}
    out["dimension_bounds"] = bnd.graph_dimension_bounds(g, tau).to_dict()
    if all(d == 3 for d in g.degrees):
        out["cubic"] = bnd.cubic_checks(g, cap=cap).to_dict()
    part = recognize_split(g)
    if part is not None:
        lo, hi = bnd.split_tau2_bounds(g)
        value, prov = tau["tau2"]
        out["split"] = {"omega": part.omega, "K": list(part.K), "lo": lo, "hi": hi, "tau2": value,
                        "provenance": prov, "bracketed": lo <= value <= hi if prov == "exact" else None,
                        # the lower bound's argument relies on |K| >= 3 tree structure
                        "case": "omega>=3" if part.omega >= 3 else "omega<=2"}
        if recognize_threshold(g) is not None:
            out["split"]["threshold_tau2"] = bnd.threshold_solve(g).optimum
    return out


def cmd_bounds(args) -> int:
    reports = []
    for path in args.graphs:
        rep = bounds_for_graph(read_graph(path), args.cap)
        rep["graph"] = path
        reports.append(rep)
    rows = []
    for rep in reports:
        for section in ("tree_bounds", "dimension_bounds", "cubic"):
            for rec in rep.get(section, {}).get("records", []):
                rows.append([rep["graph"], section, rec["name"], rec["lhs"], rec["rhs"], rec["holds"],
                             rec["equality"], rec["characterization_expected"], rec["applicable"],
                             rec["precondition"]])
    cols = ["graph", "section", "name", "lhs", "rhs", "holds", "equality", "characterization_expected",
            "applicable", "precondition"]
    _emit(reports if len(reports) > 1 else reports[0], args.format, args.out, rows, cols)
    return EXIT_OK


# -- bench -------------------------------------------------------------------------

@dataclass
class BenchRecord:
    graph_id: str
    family: str
    n: int
    m: int
    method: str
    value: Optional[int]
    alpha: Optional[Fraction]
    time_ms: float
    status: str

    def row(self):
        alpha = "" if self.alpha is None else f"{float(self.alpha):.6f}"
        value = "" if self.value is None else self.value
        return [self.graph_id, self.family, self.n, self.m, self.method, value, alpha,
                f"{self.time_ms:.3f}", self.status]


def _expand_batch(entries, seed):
    """Yield ``{graph_id, family, spec, graph}`` for each batch item.

    List-valued parameters expand as a grid; ``count`` graphs are drawn per
    grid point.  Random families are redrawn until connected, seeds coming
    from one generator seeded with ``seed``.
    """
    rng = make_rng(seed)
    for entry in entries:
        entry = dict(entry)
        family = entry.pop("family")
        if family not in FAMILIES:
            raise GraphInputError(f"unknown family {family!r}")
        count = int(entry.pop("count", 1))
        params = dict(entry.pop("params", {}))
        params.update(entry)
        keys = sorted(k for k, v in params.items() if isinstance(v, list) and k != "triples")
        grids = itertools.product(*(params[k] for k in keys)) if keys else [()]
        for combo in grids:
            p = dict(params)
            p.update(zip(keys, combo))
            tag = "-".join(f"{k}{p[k]}" for k in sorted(p) if k not in ("triples", "p")) or "x"
            for i in range(count):
                g, spec = None, None
                for _ in range(1000):
                    spec = GenSpec(family, p, int(rng.integers(2**31)))
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore", DisconnectedGadgetWarning)
                        g = generate(spec)
                    if is_connected(g) or family != "erdos_renyi":
                        break
                yield {"graph_id": f"{family}-{tag}-{i:03d}", "family": family, "spec": spec, "graph": g}


def _bench_task(task):
    graph_id, family, n_edges, g, method, opts = task
    start = time.perf_counter()
    value, status = None, "heuristic"
    try:
        require_connected(g)
        if method == "exact":
            value, status = solve_exact(g, opts["metric"], cap=opts["cap"], timeout_s=opts["timeout"]).optimum, "optimal"
        elif method in ("heuristic1", "heuristic2", "local-search"):
            from .heuristics import heuristic1, heuristic2
            from .transforms import local_search

            t = heuristic1(g) if method == "heuristic1" else heuristic2(g)
            if method == "local-search":
                t = local_search(g, t, opts["metric"])
            value = s_metric(t) if opts["metric"] == "s" else m_metric(t)
        else:
            from .ilp import build_model, extract_tree, run_external_solver

            model = build_model(g, opts["formulation"], opts["metric"])
            a = run_external_solver(model, opts["solver_cmd"], opts["timeout"])
            t = extract_tree(g, a, opts["metric"])
            value = s_metric(t) if opts["metric"] == "s" else m_metric(t)
            status = "optimal" if a.status in (None, "optimal") else "timeout"
    except SolveTimeout:
        value, status = None, "timeout"
    except (RefusedError, DisconnectedGraphError):
        value, status = None, "refused"
    except SFTreeError:
        value, status = None, "failed"
    ms = 1000 * (time.perf_counter() - start)
    return BenchRecord(graph_id, family, g.n, n_edges, method, value, None, ms, status)


def run_bench(entries, methods, seed=None, repetitions=1, threads=1, metric="s", cap=DEFAULT_CAP,
              timeout=None, solver_cmd=None, formulation="mtz") -> list[BenchRecord]:
    """One record per (graph, method, repetition), sorted by graph id then
    method.  ``alpha`` is filled from an exact (or solver-proven) optimum of
    the same graph and left empty otherwise."""
    for m in methods:
        if m not in BENCH_METHODS:
            raise GraphInputError(f"unknown bench method {m!r}")
    opts = {"metric": metric, "cap": cap, "timeout": timeout, "solver_cmd": solver_cmd,
            "formulation": formulation}
    tasks = []
    for item in _expand_batch(entries, seed):
        g = item["graph"]
        for method in methods:
            for _ in range(repetitions):
                tasks.append((item["graph_id"], item["family"], g.m, g, method, opts))
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_bench_task, tasks))
    else:
        records = [_bench_task(t) for t in tasks]
    best = {}
    for r in records:
        if r.status == "optimal" and r.value is not None:
            best[r.graph_id] = r.value
    for r in records:
        if r.graph_id in best and r.value:
            r.alpha = Fraction(best[r.graph_id], r.value)
    records.sort(key=lambda r: (r.graph_id, r.method))
    return records


def cmd_bench(args) -> int:
    with open(args.spec) as fh:
        spec = json.load(fh)
    if isinstance(spec, dict):
        entries = spec.get("graphs", [])
        methods = args.methods or spec.get("methods")
    else:
        entries, methods = spec, args.methods
    methods = methods or ["exact", "heuristic1", "heuristic2"]
    if isinstance(methods, str):
        methods = methods.split(",")
    records = run_bench(entries, methods, args.seed, args.repetitions, args.threads, args.metric,
                        args.cap, args.timeout, _solver_cmd(args), args.formulation)
    if args.format == "json":
        data = [dict(asdict(r), alpha=None if r.alpha is None else float(r.alpha)) for r in records]
        _emit(data, "json", args.out)
    else:
        _emit(None, "csv", args.out, [r.row() for r in records], BENCH_COLUMNS)
    return EXIT_OK


# -- epi --------------------------------------------------------------------------

def cmd_epi(args) -> int:
    from . import epi

    if args.write_fixture:
        with open(args.write_fixture, "w") as fh:
            fh.write(epi.format_fasta(epi.planted_outbreak(args.seed or 0)))
        if not args.fasta:
            return EXIT_OK
    if not args.fasta:
        raise GraphInputError("epi needs a FASTA file")
    patients = epi.parse_sequences(args.fasta)
    comps = epi.epi_components(patients, Fraction(args.threshold), args.ignore_n)
    solver_cmd = _solver_cmd(args) if args.solver == "ilp" else None
    epi.transmission_report(comps, args.solver, cap=args.cap, solver_cmd=solver_cmd, timeout_s=args.timeout)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(epi.report_json(comps) + "\n")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(epi.report_csv(comps))
    sys.stdout.write(epi.report_csv(comps) if args.format == "csv" else epi.report_json(comps) + "\n")
    return EXIT_OK


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sftree", description="s-/m-optimal spanning trees")
    ap.add_argument("--seed", type=int, default=None, help="seed for every random draw")
    ap.add_argument("--threads", type=int, default=1, help="worker processes for batch work")
    ap.add_argument("--format", choices=("csv", "json"), default=None,
                    help="output format (bench defaults to csv, everything else to json)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a graph in the text format")
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--spec", help="JSON batch spec; writes one file per graph into --out")
    for key in ("n", "omega", "t", "k", "rows", "cols", "a", "b", "leaves"):
        g.add_argument(f"--{key}", type=int)
    g.add_argument("--clique-size", dest="clique_size", type=int)
    g.add_argument("--p", help="edge probability, number or 'c/n'")
    g.add_argument("--triples", help="3-DM triples as 'x,y,z;x,y,z'")
    g.add_argument("--split", action="store_true", help="split variant of the 3-DM gadget")
    g.add_argument("--param", action="append", metavar="KEY=VALUE")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    def solver_flags(p):
        p.add_argument("--metric", choices=("s", "m"), default="s")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="spanning-tree cap for exact")
        p.add_argument("--timeout", "--timeout-s", dest="timeout", type=float, default=None,
                       help="seconds per solve")
        p.add_argument("--solver-cmd", help=f"MILP command template (env {SOLVER_ENV})")
        p.add_argument("--formulation", choices=("martin", "mtz"), default="mtz")

    s = sub.add_parser("solve", help="optimize one graph")
    s.add_argument("graph")
    s.add_argument("--method", choices=SOLVE_METHODS, default="exact")
    s.add_argument("--start", choices=("heuristic1", "heuristic2"), default="heuristic2",
                   help="start tree for local-search")
    s.add_argument("--emit-only", action="store_true", help="with ilp-solve: write the model, do not solve")
    s.add_argument("--out")
    solver_flags(s)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bounds", help="bound and identity report")
    b.add_argument("graphs", nargs="+")
    b.add_argument("--cap", type=int, default=DEFAULT_CAP)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    be = sub.add_parser("bench", help="batch benchmark to CSV")
    be.add_argument("spec", help="JSON batch spec")
    be.add_argument("--methods", type=lambda x: x.split(","), help="comma-separated methods")
    be.add_argument("--repetitions", type=int, default=1)
    be.add_argument("--out")
    solver_flags(be)
    be.set_defaults(func=cmd_bench)

    e = sub.add_parser("epi", help="outbreak transmission trees from FASTA")
    e.add_argument("fasta", nargs="?")
    e.add_argument("--solver", choices=("exact", "ilp", "heuristic2"), default="exact")
    e.add_argument("--threshold", default="29/800", help="distance cutoff, inclusive (rational)")
    e.add_argument("--ignore-n", action="store_true", help="drop N positions instead of counting mismatches")
    e.add_argument("--json", help="write the JSON report here")
    e.add_argument("--csv", help="write the CSV summary here")
    e.add_argument("--write-fixture", metavar="PATH", help="write the planted 9-patient FASTA")
    solver_flags(e)
    e.set_defaults(func=cmd_epi)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "bench" else "json"
    try:
        return args.func(args)
    except Exception as exc:
        code = exit_code_for(exc)
        if code == 1:
            raise
        print(f"sftree: error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
