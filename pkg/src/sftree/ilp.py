"""Integer programming models for the s-/m-optimal spanning tree.

The metric is linearized over trails: the s-metric of a tree is
``sum y3 + 2 sum y2 + sum x`` where ``x_e`` selects edges, ``y2`` marks
selected wedges (two edges at a common vertex) and ``y3`` marks selected
3-edge trails.  Spanning-tree structure is imposed either by Martin's
rooted-flow extended formulation (one orientation per root) or by
Miller-Tucker-Zemlin ordering constraints with a single root.

Models are emitted as CPLEX-LP text and solved out of process: a configured
command reads the model file and writes ``name value`` lines.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    SolutionMismatchError,
    SolutionParseError,
    SolverConfigError,
    SolverFailedError,
    SolverNotFoundError,
    SolverTimeoutError,
)
from .graph import Graph, SpanningTree, metric_value, require_connected, validate_spanning_tree

__all__ = [
    "TrailSets",
    "Var",
    "Constraint",
    "IlpModel",
    "Assignment",
    "BINARY_TOL",
    "enumerate_trails",
    "build_model",
    "emit_lp",
    "parse_solution",
    "format_solution",
    "run_external_solver",
    "extract_tree",
    "tree_point",
    "check_point",
    "objective_value",
]

BINARY_TOL = 1e-4


@dataclass(frozen=True)
class TrailSets:
    """Wedges ``(i, j)`` with ``i < j`` and 3-edge trails ``(a, mid, b)``
    with end edges ``a < b`` and middle edge ``mid``."""

    wedges: tuple[tuple[int, int], ...]
    trails3: tuple[tuple[int, int, int], ...]


def enumerate_trails(g: Graph) -> TrailSets:
    """All wedges and 3-edge trails of ``g`` (triangle traversals included,
    once per choice of middle edge), in canonical order."""
    incident: list[list[int]] = [[] for _ in range(g.n)]
    for e, (u, v) in enumerate(g.edges):
        incident[u].append(e)
        incident[v].append(e)
    wedges = set()
    for inc in incident:
        for a in range(len(inc)):
            for b in range(a + 1, len(inc)):
                i, j = inc[a], inc[b]
                wedges.add((min(i, j), max(i, j)))
    trails = []
    for mid, (u, v) in enumerate(g.edges):
        for a in incident[u]:
            if a == mid:
                continue
            for b in incident[v]:
                if b == mid:
                    continue
                lo, hi = (a, b) if a < b else (b, a)
                trails.append((lo, mid, hi))
    trails.sort(key=lambda t: (tuple(sorted(t)), t[1]))
    return TrailSets(tuple(sorted(wedges)), tuple(trails))


@dataclass(frozen=True)
class Var:
    name: str
    kind: str  # "binary" | "continuous"
    lb: float = 0
    ub: Optional[float] = None


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[int, str], ...]
    sense: str  # "<=", ">=", "="
    rhs: int


@dataclass
class IlpModel:
    formulation: str
    metric: str
    n: int
    variables: dict = field(default_factory=dict)
    constraints: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    entity: dict = field(default_factory=dict)
    root: Optional[int] = None
    trails: Optional[TrailSets] = None

    def add_var(self, name, kind, lb=0, ub=None, entity=None):
        self.variables[name] = Var(name, kind, lb, ub)
        if entity is not None:
            self.entity[name] = entity
        return name

    def add_constraint(self, name, terms, sense, rhs):
        self.constraints.append(Constraint(name, tuple(terms), sense, rhs))

    def count(self, prefix: str) -> int:
        return sum(1 for v in self.variables if v.startswith(prefix))

    def var_for(self, *entity) -> str:
        for name, ent in self.entity.items():
            if ent == entity:
                return name
        raise KeyError(entity)


def _x(e):
    return f"x_{e}"


def build_model(g: Graph, formulation: str = "mtz", metric: str = "s") -> IlpModel:
    """Assemble the Martin or MTZ model for the s- or m-metric.

    MTZ is rooted at the maximum-degree vertex (smallest id on ties).  In
    Martin's model every vertex acts as a root; arcs entering a root are
    pinned to zero.  ``y`` variables are continuous in ``[0, 1]``: at
    integral ``x`` the linearization forces them to the edge products.
    """
    if formulation not in ("martin", "mtz"):
        raise ValueError(f"unknown formulation {formulation!r}")
    if metric not in ("s", "m"):
        raise ValueError(f"unknown metric {metric!r}")
    if g.n < 2:
        raise ValueError("ILP model needs at least two vertices")
    require_connected(g)
    n = g.n
    model = IlpModel(formulation, metric, n)
    trails = enumerate_trails(g)
    model.trails = trails

    for e in range(g.m):
        model.add_var(_x(e), "binary", 0, 1, ("x", e))
    for i, j in trails.wedges:
        name = model.add_var(f"y2_{i}_{j}", "continuous", 0, 1, ("y2", i, j))
        model.add_constraint(f"w_{i}_{j}_a", [(1, name), (-1, _x(i))], "<=", 0)
        model.add_constraint(f"w_{i}_{j}_b", [(1, name), (-1, _x(j))], "<=", 0)
        model.add_constraint(f"w_{i}_{j}_c", [(1, name), (-1, _x(i)), (-1, _x(j))], ">=", -1)
    if metric == "s":
        for a, mid, b in trails.trails3:
            name = model.add_var(f"y3_{a}_{mid}_{b}", "continuous", 0, 1, ("y3", a, mid, b))
            tag = f"p_{a}_{mid}_{b}"
            for k, e in enumerate((a, mid, b)):
                model.add_constraint(f"{tag}_{'abc'[k]}", [(1, name), (-1, _x(e))], "<=", 0)
            model.add_constraint(
                f"{tag}_d", [(1, name), (-1, _x(a)), (-1, _x(mid)), (-1, _x(b))], ">=", -2
            )

    # objective: s = sum y3 + 2 sum y2 + sum x ; m = 2 sum y2 + 2 sum x
    xw, yw = (1, 2) if metric == "s" else (2, 2)
    for name, ent in model.entity.items():
        if ent[0] == "x":
            model.objective[name] = xw
        elif ent[0] == "y2":
            model.objective[name] = yw
        elif ent[0] == "y3":
            model.objective[name] = 1

    if formulation == "martin":
        _martin(model, g)
    else:
        _mtz(model, g)
    return model


def _martin(model: IlpModel, g: Graph) -> None:
    n = g.n
    for r in range(n):
        for u, v in g.edges:
            for a, b in ((u, v), (v, u)):
                ub = 0 if b == r else None
                model.add_var(f"z_{r}_{a}_{b}", "continuous", 0, ub, ("z", r, a, b))
    for r in range(n):
        for e, (u, v) in enumerate(g.edges):
            model.add_constraint(
                f"link_{r}_{e}", [(1, _x(e)), (-1, f"z_{r}_{u}_{v}"), (-1, f"z_{r}_{v}_{u}")], "=", 0
            )
        for w in range(n):
            terms = [(1, f"z_{r}_{v}_{w}") for v in g.adjacency[w]]
            if w == r:
                model.add_constraint(f"root_{r}", terms, "=", 0)
            else:
                model.add_constraint(f"in_{r}_{w}", terms, "=", 1)


def _mtz(model: IlpModel, g: Graph) -> None:
    n = g.n
    root = min(range(n), key=lambda v: (-g.degrees[v], v))
    model.root = root
    for u, v in g.edges:
        for a, b in ((u, v), (v, u)):
            model.add_var(f"z_{a}_{b}", "binary", 0, 1, ("z", a, b))
    for v in range(n):
        model.add_var(f"t_{v}", "continuous", 0, n - 1, ("t", v))
    for e, (u, v) in enumerate(g.edges):
        model.add_constraint(f"link_{e}", [(1, _x(e)), (-1, f"z_{u}_{v}"), (-1, f"z_{v}_{u}")], "=", 0)
    for w in range(n):
        terms = [(1, f"z_{v}_{w}") for v in g.adjacency[w]]
        if w == root:
            model.add_constraint(f"root_{w}", terms, "=", 0)
        else:
            model.add_constraint(f"in_{w}", terms, "=", 1)
    for u, v in g.edges:
        for a, b in ((u, v), (v, u)):
            model.add_constraint(
                f"order_{a}_{b}", [(1, f"t_{a}"), (-1, f"t_{b}"), (n, f"z_{a}_{b}")], "<=", n - 1
            )


# -- LP text -------------------------------------------------------------------

_LINE = 240


def _fmt_terms(terms) -> list[str]:
    out = []
    for coef, name in terms:
        sign = "-" if coef < 0 else "+"
        out.append(f"{sign} {abs(coef)} {name}")
    return out


def _wrap(head: str, pieces: list[str]) -> list[str]:
    lines = []
    cur = head
    for p in pieces:
        if len(cur) + 1 + len(p) > _LINE:
            lines.append(cur)
            cur = "   " + p
        else:
            cur = f"{cur} {p}"
    lines.append(cur)
    return lines


def _num(x) -> str:
    if isinstance(x, float) and x.is_integer():
        x = int(x)
    return str(x)


def emit_lp(model: IlpModel) -> str:
    """CPLEX-LP text: objective, constraints, bounds, binaries.  Output is
    a pure function of the model."""
    lines = [
        f"\\ sftree model formulation={model.formulation} metric={model.metric}"
        + (f" root={model.root}" if model.root is not None else ""),
        "Maximize",
    ]
    obj = [(c, name) for name, c in model.objective.items()]
    lines += _wrap(" obj:", _fmt_terms(obj))
    lines.append("Subject To")
    for c in model.constraints:
        lines += _wrap(f" {c.name}:", _fmt_terms(c.terms) + [c.sense, _num(c.rhs)])
    lines.append("Bounds")
    binaries = []
    for v in model.variables.values():
        if v.kind == "binary":
            binaries.append(v.name)
            continue
        if v.ub is not None and v.ub == v.lb:
            lines.append(f" {v.name} = {_num(v.lb)}")
        elif v.ub is not None:
            lines.append(f" {_num(v.lb)} <= {v.name} <= {_num(v.ub)}")
        else:
            lines.append(f" {v.name} >= {_num(v.lb)}")
    lines.append("Binaries")
    lines += _wrap("", binaries) if binaries else []
    lines.append("End")
    return "\n".join(lines) + "\n"


# -- solutions -------------------------------------------------------------------

@dataclass
class Assignment:
    values: dict
    objective: Optional[float] = None
    status: str = "optimal"


_STATUSES = ("optimal", "timeout", "infeasible", "feasible")


def parse_solution(text: str) -> Assignment:
    """Parse ``name value`` lines plus optional ``objective`` and ``status``
    lines; ``#`` starts a comment."""
    values = {}
    objective = None
    status = "optimal"
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolutionParseError(f"line {lineno}: expected 'name value', got {raw!r}")
        key, val = parts
        low = key.lower()
        if low == "status":
            if val.lower() not in _STATUSES:
                raise SolutionParseError(f"line {lineno}: unknown status {val!r}")
            status = val.lower()
            continue
        try:
            num = float(val)
        except ValueError:
            raise SolutionParseError(f"line {lineno}: non-numeric value {val!r}") from None
        if low in ("objective", "obj"):
            objective = num
        else:
            values[key] = num
    return Assignment(values, objective, status)


def format_solution(a: Assignment) -> str:
    lines = [f"status {a.status}"]
    if a.objective is not None:
        lines.append(f"objective {a.objective!r}")
    lines += [f"{k} {v!r}" for k, v in a.values.items()]
    return "\n".join(lines) + "\n"


def run_external_solver(
    model: IlpModel,
    solver_cmd,
    timeout_s: Optional[float] = None,
    workdir: Optional[str] = None,
) -> Assignment:
    """Write the model, run the solver command, parse its solution.

    ``solver_cmd`` is a command string or argv list; ``{model}`` and
    ``{solution}`` are replaced by file paths.  Without ``{model}`` the
    model path is appended; without ``{solution}`` the solution is read
    from stdout.
    """
    if not solver_cmd:
        raise SolverConfigError("no solver command configured")
    argv_t = shlex.split(solver_cmd) if isinstance(solver_cmd, str) else list(solver_cmd)
    if not argv_t:
        raise SolverConfigError("empty solver command")
    own_dir = workdir is None
    tmp = tempfile.mkdtemp(prefix="sftree-ilp-") if own_dir else workdir
    try:
        model_path = os.path.join(tmp, "model.lp")
        sol_path = os.path.join(tmp, "solution.txt")
        with open(model_path, "w") as fh:
            fh.write(emit_lp(model))
        joined = " ".join(argv_t)
        if "{model}" not in joined:
            argv_t = argv_t + ["{model}"]
        argv = [a.replace("{model}", model_path).replace("{solution}", sol_path) for a in argv_t]
        if shutil.which(argv[0]) is None and not os.path.isfile(argv[0]):
            raise SolverNotFoundError(f"solver executable {argv[0]!r} not found")
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout_s)
        except subprocess.TimeoutExpired:
            raise SolverTimeoutError(f"solver exceeded {timeout_s} s") from None
        except (FileNotFoundError, PermissionError) as exc:
            raise SolverNotFoundError(str(exc)) from None
        if proc.returncode != 0:
            raise SolverFailedError(
                f"solver exited with status {proc.returncode}", proc.returncode, proc.stderr
            )
        if "{solution}" in joined:
            try:
                with open(sol_path) as fh:
                    text = fh.read()
            except OSError:
                raise SolutionParseError("solver did not write a solution file") from None
        else:
            text = proc.stdout
        return parse_solution(text)
    finally:
        if own_dir:
            shutil.rmtree(tmp, ignore_errors=True)


def _as_binary(name, value):
    r = round(value)
    if abs(value - r) > BINARY_TOL or r not in (0, 1):
        raise SolutionMismatchError(f"{name}={value} is not binary within {BINARY_TOL}")
    return r


def extract_tree(g: Graph, a: Assignment, metric: str = "s") -> SpanningTree:
    """Decode the selected edges and check the tree against the objective.

    Every ``x_e`` must be present and binary within :data:`BINARY_TOL`.
    When the assignment carries an objective, the recomputed metric must
    equal it after integer rounding.
    """
    if a.status == "infeasible":
        raise SolutionMismatchError("solver reported the model infeasible")
    if a.status == "timeout" and not a.values:
        raise SolverTimeoutError("solver hit its time limit without an incumbent")
    chosen = []
    for e in range(g.m):
        name = _x(e)
        if name not in a.values:
            raise SolutionMismatchError(f"assignment lacks {name}")
        if _as_binary(name, a.values[name]):
            chosen.append(e)
    tree = validate_spanning_tree(g, chosen)
    if a.objective is not None:
        value = metric_value(tree, metric)
        if abs(a.objective - round(a.objective)) > BINARY_TOL * max(1.0, abs(a.objective)):
            raise SolutionMismatchError(f"objective {a.objective} is not integral")
        if round(a.objective) != value:
            raise SolutionMismatchError(
                f"reported objective {a.objective} but the decoded tree has {metric}={value}"
            )
    return tree


# -- integral points ------------------------------------------------------------

def _orient(tree: SpanningTree, root: int):
    adj = tree.adjacency
    parent = {root: None}
    depth = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                depth[y] = depth[x] + 1
                queue.append(y)
    return parent, depth


def tree_point(model: IlpModel, tree: SpanningTree) -> dict:
    """The integral point a tree induces: ``x`` from the tree, each ``y`` at
    its largest feasible value, tree arcs oriented away from the root(s),
    ``t`` the depth from the MTZ root."""
    vals = {}
    for name, ent in model.entity.items():
        kind = ent[0]
        if kind == "x":
            vals[name] = 1 if ent[1] in tree.tree_edges else 0
    for name, ent in model.entity.items():
        if ent[0] in ("y2", "y3"):
            vals[name] = min(vals[_x(e)] for e in ent[1:])
    if model.formulation == "martin":
        for r in range(model.n):
            parent, _ = _orient(tree, r)
            for name, ent in model.entity.items():
                if ent[0] == "z" and ent[1] == r:
                    vals[name] = 1 if parent.get(ent[3]) == ent[2] else 0
    else:
        parent, depth = _orient(tree, model.root)
        for name, ent in model.entity.items():
            if ent[0] == "z":
                vals[name] = 1 if parent.get(ent[2]) == ent[1] else 0
            elif ent[0] == "t":
                vals[name] = depth[ent[1]]
    return vals


def check_point(model: IlpModel, values: dict, tol: float = 1e-9) -> list[str]:
    """Names of violated constraints, bounds and integrality requirements."""
    bad = []
    for v in model.variables.values():
        x = values.get(v.name, 0)
        if x < v.lb - tol or (v.ub is not None and x > v.ub + tol):
            bad.append(f"bound:{v.name}")
        if v.kind == "binary" and min(abs(x), abs(x - 1)) > tol:
            bad.append(f"integrality:{v.name}")
    for c in model.constraints:
        lhs = sum(coef * values.get(name, 0) for coef, name in c.terms)
        ok = (
            lhs <= c.rhs + tol if c.sense == "<="
            else lhs >= c.rhs - tol if c.sense == ">="
            else abs(lhs - c.rhs) <= tol
        )
        if not ok:
            bad.append(c.name)
    return bad


def objective_value(model: IlpModel, values: dict):
    return sum(coef * values.get(name, 0) for name, coef in model.objective.items())
