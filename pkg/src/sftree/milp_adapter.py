"""Command-line MILP adapter: read a CPLEX-LP file, solve it with HiGHS
(via ``scipy.optimize.milp``), write a ``name value`` solution file.

Usage::

    python -m sftree.milp_adapter MODEL.lp SOLUTION.txt [--time-limit S]

It handles the LP subset :func:`sftree.ilp.emit_lp` writes: one objective,
linear rows with ``<=``, ``>=`` or ``=``, simple bounds and a binaries
section.  Exit status is 0 whenever a status line was written.
"""

from __future__ import annotations

import argparse
import re
import shlex
import sys

import numpy as np

__all__ = ["LpProblem", "parse_lp", "solve_lp", "default_command", "main"]

_SECTIONS = {
    "maximize": "max", "maximise": "max", "maximum": "max", "max": "max",
    "minimize": "min", "minimise": "min", "minimum": "min", "min": "min",
    "subject": "st", "such": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "generals": "gen", "general": "gen", "gen": "gen",
    "end": "end",
}

_TOKEN = re.compile(r"<=|>=|=<|=>|[<>=]|[+-]|[^\s+\-<>=]+")


class LpProblem:
    def __init__(self):
        self.sense = "max"
        self.objective: dict[str, float] = {}
        self.rows: list[tuple[str, dict, str, float]] = []
        self.lb: dict[str, float] = {}
        self.ub: dict[str, float] = {}
        self.integer: set[str] = set()
        self.names: list[str] = []
        self._seen: set[str] = set()

    def touch(self, name):
        if name not in self._seen:
            self._seen.add(name)
            self.names.append(name)


def _is_number(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _linear(tokens, i, prob):
    """Parse ``[+-] [coef] var ...`` starting at ``tokens[i]``; stop at a
    sense operator or the end."""
    terms: dict[str, float] = {}
    sign = 1.0
    coef = None
    while i < len(tokens) and tokens[i] not in ("<=", ">=", "=", "<", ">", "=<", "=>"):
        tok = tokens[i]
        if tok == "+":
            sign = 1.0
        elif tok == "-":
            sign = -1.0
        elif _is_number(tok):
            coef = float(tok)
        else:
            prob.touch(tok)
            terms[tok] = terms.get(tok, 0.0) + sign * (1.0 if coef is None else coef)
            sign, coef = 1.0, None
        i += 1
    return terms, i


def parse_lp(text: str) -> LpProblem:
    prob = LpProblem()
    section = None
    chunks: dict[str, list[str]] = {"obj": [], "st": [], "bounds": [], "bin": [], "gen": []}
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0].lower()
        if head in _SECTIONS and (head != "st" or len(line.split()) == 1):
            tag = _SECTIONS[head]
            if tag in ("max", "min"):
                prob.sense = tag
                section = "obj"
            elif tag == "end":
                section = None
            else:
                section = tag
            continue
        if section is None:
            continue
        if section == "bounds":
            chunks["bounds"].append(line)
        else:
            chunks[section].append(line)

    obj = " ".join(chunks["obj"])
    obj = re.sub(r"^\s*\S+:", "", obj)
    prob.objective, _ = _linear(_TOKEN.findall(obj), 0, prob)

    tokens = _TOKEN.findall(" ".join(chunks["st"]))
    i = 0
    while i < len(tokens):
        name = f"r{len(prob.rows)}"
        if tokens[i].endswith(":"):
            name = tokens[i][:-1]
            i += 1
        terms, i = _linear(tokens, i, prob)
        op = {"<": "<=", "=<": "<=", ">": ">=", "=>": ">="}.get(tokens[i], tokens[i])
        i += 1
        rhs_sign = 1.0
        if tokens[i] in ("+", "-"):
            rhs_sign = -1.0 if tokens[i] == "-" else 1.0
            i += 1
        rhs = rhs_sign * float(tokens[i])
        i += 1
        prob.rows.append((name, terms, op, rhs))

    for line in chunks["bounds"]:
        toks = _TOKEN.findall(line)
        toks = _merge_signs(toks)
        if len(toks) == 5:  # lo <= x <= hi
            prob.touch(toks[2])
            prob.lb[toks[2]] = float(toks[0])
            prob.ub[toks[2]] = float(toks[4])
        elif len(toks) == 3:
            var, op, val = toks
            if _is_number(var):
                var, val = val, var
                op = {"<=": ">=", ">=": "<="}.get(op, op)
            prob.touch(var)
            if val.lower() in ("inf", "+inf", "infinity"):
                v = np.inf
            elif val.lower() in ("-inf", "-infinity"):
                v = -np.inf
            else:
                v = float(val)
            if op == "=":
                prob.lb[var] = prob.ub[var] = v
            elif op == ">=":
                prob.lb[var] = v
            else:
                prob.ub[var] = v
        elif len(toks) == 2 and toks[1].lower() == "free":
            prob.touch(toks[0])
            prob.lb[toks[0]] = -np.inf
    for section in ("bin", "gen"):
        for name in " ".join(chunks[section]).split():
            prob.touch(name)
            prob.integer.add(name)
            if section == "bin":
                prob.lb[name] = max(prob.lb.get(name, 0.0), 0.0)
                prob.ub[name] = min(prob.ub.get(name, 1.0), 1.0)
    return prob


def _merge_signs(toks):
    out = []
    for t in toks:
        if out and out[-1] in ("+", "-") and (len(out) == 1 or out[-2] in ("<=", ">=", "=")):
            sign = out.pop()
            out.append(sign + t if sign == "-" else t)
        else:
            out.append(t)
    return out


def solve_lp(prob: LpProblem, time_limit=None):
    """Return ``(status, objective, values)``."""
    from scipy.optimize import LinearConstraint, milp, Bounds
    from scipy.sparse import lil_matrix

    idx = {name: k for k, name in enumerate(prob.names)}
    nv = len(prob.names)
    c = np.zeros(nv)
    for name, coef in prob.objective.items():
        c[idx[name]] = coef
    if prob.sense == "max":
        c = -c
    A = lil_matrix((len(prob.rows), nv))
    lo = np.full(len(prob.rows), -np.inf)
    hi = np.full(len(prob.rows), np.inf)
    for r, (_, terms, op, rhs) in enumerate(prob.rows):
        for name, coef in terms.items():
            A[r, idx[name]] = coef
        if op in ("<=", "="):
            hi[r] = rhs
        if op in (">=", "="):
            lo[r] = rhs
    lb = np.array([prob.lb.get(n, 0.0) for n in prob.names])
    ub = np.array([prob.ub.get(n, np.inf) for n in prob.names])
    integrality = np.array([1 if n in prob.integer else 0 for n in prob.names])
    options = {}
    if time_limit is not None:
        options["time_limit"] = float(time_limit)
    cons = [LinearConstraint(A.tocsr(), lo, hi)] if prob.rows else []
    res = milp(c, constraints=cons, integrality=integrality, bounds=Bounds(lb, ub), options=options)
    if res.status == 2:
        return "infeasible", None, {}
    if res.x is None:
        status = "timeout" if res.status == 1 else "infeasible"
        return status, None, {}
    obj = float(sum(coef * res.x[idx[name]] for name, coef in prob.objective.items()))
    status = "optimal" if res.status == 0 else "timeout"
    return status, obj, {n: float(res.x[idx[n]]) for n in prob.names}


def default_command() -> str:
    """Solver command template that runs this adapter with the current
    interpreter."""
    return f"{shlex.quote(sys.executable)} -m sftree.milp_adapter {{model}} {{solution}}"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="sftree-milp-adapter", description=__doc__.splitlines()[0])
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args(argv)
    with open(args.model) as fh:
        prob = parse_lp(fh.read())
    status, obj, values = solve_lp(prob, args.time_limit)
    with open(args.solution, "w") as fh:
        fh.write(f"status {status}\n")
        if obj is not None:
            fh.write(f"objective {obj!r}\n")
        for name, val in values.items():
            fh.write(f"{name} {val!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
