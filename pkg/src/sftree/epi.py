"""Outbreak analysis: aligned sequence sets to a patient distance graph, then
per-component transmission trees and superspreader calls."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Optional, Sequence

from .errors import GraphInputError, RefusedError
from .exact import DEFAULT_CAP, count_spanning_trees, solve_exact
from .graph import Graph, SpanningTree, _DSU, build_graph, connected_components, is_connected, s_metric

__all__ = [
    "DEFAULT_THRESHOLD",
    "SequenceFormatError",
    "PatientSequences",
    "EpiComponent",
    "parse_sequences",
    "parse_fasta",
    "distance",
    "distance_matrix",
    "build_epi_graph",
    "component_threshold",
    "epi_components",
    "transmission_report",
    "report_json",
    "report_csv",
    "planted_outbreak",
    "format_fasta",
]

DEFAULT_THRESHOLD = Fraction(29, 800)  # 3.625 %
ALPHABET = frozenset("ACGTN")


class SequenceFormatError(GraphInputError):
    """Malformed FASTA input."""


@dataclass(frozen=True)
class PatientSequences:
    patient: str
    sequences: tuple

    def __post_init__(self):
        if not self.sequences:
            raise SequenceFormatError(f"patient {self.patient!r} has no sequences")

    @property
    def length(self) -> int:
        return len(self.sequences[0])


def parse_fasta(text: str) -> list[PatientSequences]:
    """Parse FASTA with ``>patient|index`` headers, grouped by patient in
    order of first appearance.  Residues are upper-cased; every sequence must
    use ``ACGTN`` and share one length."""
    groups: dict[str, list[str]] = {}
    current: Optional[list] = None
    header_pid = None
    chunks: list[str] = []

    def flush():
        if current is None:
            return
        seq = "".join(chunks).upper()
        if not seq:
            raise SequenceFormatError(f"empty sequence under patient {header_pid!r}")
        bad = set(seq) - ALPHABET
        if bad:
            raise SequenceFormatError(f"bad character(s) {sorted(bad)} for patient {header_pid!r}")
        current.append(seq)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith(">"):
            flush()
            chunks = []
            header = line[1:].strip()
            pid = header.split("|", 1)[0].strip()
            if not pid:
                raise SequenceFormatError(f"line {lineno}: header without patient id")
            header_pid = pid
            current = groups.setdefault(pid, [])
        else:
            if current is None:
                raise SequenceFormatError(f"line {lineno}: sequence data before any header")
            chunks.append("".join(line.split()))
    flush()
    if not groups:
        raise SequenceFormatError("no sequences found")
    lengths = {len(s) for seqs in groups.values() for s in seqs}
    if len(lengths) != 1:
        raise SequenceFormatError(f"sequences have mixed lengths {sorted(lengths)}")
    return [PatientSequences(pid, tuple(seqs)) for pid, seqs in groups.items()]


def parse_sequences(path) -> list[PatientSequences]:
    return parse_fasta(Path(path).read_text())


def _mismatches(x: str, y: str, ignore_n: bool):
    if ignore_n:
        kept = [(a, b) for a, b in zip(x, y) if a != "N" and b != "N"]
        return sum(a != b for a, b in kept), len(kept)
    return sum(a != b or a == "N" for a, b in zip(x, y)), len(x)


def distance(a: PatientSequences, b: PatientSequences, ignore_n: bool = False) -> Fraction:
    """Minimum relative Hamming distance over all sequence pairs.

    By default an ``N`` at either side counts as a mismatch.  With
    ``ignore_n`` such positions are dropped from both the count and the
    length.
    """
    if a.length != b.length:
        raise SequenceFormatError("sequence sets have different lengths")
    best = None
    for x in a.sequences:
        for y in b.sequences:
            k, L = _mismatches(x, y, ignore_n)
            d = Fraction(k, L) if L else Fraction(1)
            if best is None or d < best:
                best = d
    return best


def distance_matrix(patients: Sequence[PatientSequences], ignore_n: bool = False) -> list[list[Fraction]]:
    n = len(patients)
    D = [[Fraction(0)] * n for _ in range(n)]
    for i, j in combinations(range(n), 2):
        D[i][j] = D[j][i] = distance(patients[i], patients[j], ignore_n)
    return D


def build_epi_graph(patients, t=DEFAULT_THRESHOLD, ignore_n: bool = False, matrix=None):
    """Join two patients when their distance is at most ``t`` (inclusive).

    Returns ``(graph, components, matrix)``; components are sorted vertex
    lists, vertex ``i`` being ``patients[i]``.
    """
    if len(patients) < 2:
        raise SequenceFormatError("need at least two patients")
    t = Fraction(t)
    D = matrix if matrix is not None else distance_matrix(patients, ignore_n)
    n = len(patients)
    edges = [(i, j) for i, j in combinations(range(n), 2) if D[i][j] <= t]
    g = build_graph(n, edges)
    return g, connected_components(g), D


def component_threshold(sub: Sequence[Sequence[Fraction]]):
    """Smallest cutoff ``t_C`` keeping the component connected, and the graph
    of pairs at distance at most ``t_C``.

    ``t_C`` is the heaviest edge of a minimum spanning tree of the complete
    distance-weighted graph (Kruskal).
    """
    k = len(sub)
    if k == 1:
        return Fraction(0), build_graph(1, [])
    pairs = sorted(combinations(range(k), 2), key=lambda p: (sub[p[0]][p[1]], p))
    dsu = _DSU(k)
    joined = 0
    t_c = Fraction(0)
    for i, j in pairs:
        if dsu.union(i, j):
            joined += 1
            t_c = max(t_c, Fraction(sub[i][j]))
            if joined == k - 1:
                break
    pruned = build_graph(k, [(i, j) for i, j in pairs if sub[i][j] <= t_c])
    return t_c, pruned


@dataclass
class EpiComponent:
    index: int
    members: list  # patient ids
    vertices: list  # indices into the patient list
    submatrix: list
    t_c: Fraction
    graph: Graph
    tree: Optional[SpanningTree] = None
    s_value: Optional[int] = None
    superspreader: Optional[str] = None
    method: str = ""
    note: str = ""

    def tree_edges(self) -> list:
        if self.tree is None:
            return []
        return sorted(
            tuple(sorted((self.members[u], self.members[v]))) for u, v in self.tree.edges
        )

    def to_dict(self) -> dict:
        return {
            "component": self.index,
            "members": list(self.members),
            "t_C": str(self.t_c),
            "t_C_float": float(self.t_c),
            "method": self.method,
            "s_value": self.s_value,
            "superspreader": self.superspreader,
            "tree_edges": [list(e) for e in self.tree_edges()],
        }


def epi_components(patients, t=DEFAULT_THRESHOLD, ignore_n: bool = False) -> list:
    """Components of the thresholded graph, each with its own bottleneck
    cutoff and pruned graph."""
    g, comps, D = build_epi_graph(patients, t, ignore_n)
    out = []
    for idx, verts in enumerate(comps):
        sub = [[D[i][j] for j in verts] for i in verts]
        t_c, pruned = component_threshold(sub)
        out.append(EpiComponent(idx, [patients[v].patient for v in verts], list(verts), sub, t_c, pruned))
    return out


def transmission_report(
    components,
    solver: str = "exact",
    t=DEFAULT_THRESHOLD,
    ignore_n: bool = False,
    cap: int = DEFAULT_CAP,
    solver_cmd: Optional[str] = None,
    timeout_s: Optional[float] = None,
) -> list[EpiComponent]:
    """Solve each component's pruned graph for an s-optimal (or heuristic)
    tree and name its maximum-degree vertex (ties by member order).

    ``components`` is either a list of :class:`EpiComponent` or the patient
    list itself, in which case the graph is built with threshold ``t``.
    A component too large for ``exact`` raises :class:`RefusedError` naming
    the alternatives; nothing is downgraded silently.
    """
    if solver not in ("exact", "ilp", "heuristic2"):
        raise ValueError(f"unknown solver {solver!r}")
    if components and isinstance(components[0], PatientSequences):
        components = epi_components(components, t, ignore_n)
    for comp in components:
        g = comp.graph
        if not is_connected(g):
            raise GraphInputError(f"component {comp.index} is not connected")
        if g.n == 1:
            comp.tree, comp.s_value = SpanningTree(g, []), 0
        elif solver == "exact":
            count = count_spanning_trees(g)
            if count > cap:
                raise RefusedError(
                    f"component {comp.index} has {count} spanning trees (cap {cap}); "
                    "rerun with --solver ilp or --solver heuristic2",
                    count,
                )
            res = solve_exact(g, "s", cap=cap)
            comp.tree, comp.s_value = res.tree, res.optimum
        elif solver == "heuristic2":
            from .heuristics import heuristic2

            comp.tree = heuristic2(g)
            comp.s_value = s_metric(comp.tree)
        else:
            from .ilp import build_model, extract_tree, run_external_solver

            if solver_cmd is None:
                from .milp_adapter import default_command

                solver_cmd = default_command()
            model = build_model(g, "martin", "s")
            comp.tree = extract_tree(g, run_external_solver(model, solver_cmd, timeout_s), "s")
            comp.s_value = s_metric(comp.tree)
        comp.method = solver
        deg = comp.tree.degrees
        hub = min(range(g.n), key=lambda v: (-deg[v], v))
        comp.superspreader = comp.members[hub]
    return components


def report_json(components) -> str:
    return json.dumps([c.to_dict() for c in components], indent=2)


CSV_COLUMNS = ["component", "size", "t_C", "method", "s_value", "superspreader"]


def report_csv(components) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in components:
        w.writerow([c.index, len(c.members), str(c.t_c), c.method, c.s_value, c.superspreader])
    return buf.getvalue()


def format_fasta(patients: Sequence[PatientSequences]) -> str:
    lines = []
    for p in patients:
        for k, seq in enumerate(p.sequences):
            lines.append(f">{p.patient}|{k}")
            lines.append(seq)
    return "\n".join(lines) + "\n"


def planted_outbreak(seed: int = 0, length: int = 264) -> list[PatientSequences]:
    """Nine patients around a planted hub ``P0``.

    Every other patient carries five private substitutions relative to the
    hub's first sequence (distance 5/L).  ``P1``/``P2`` share three of them
    (distance 4/L) and ``P3``/``P4`` share two (distance 6/L, above the
    bottleneck threshold 5/L, so that pair is pruned).  Each patient gets a
    second, farther sequence with one more private substitution.
    """
    import numpy as np

    rng = np.random.Generator(np.random.PCG64(seed))
    bases = np.array(list("ACGT"))
    base = "".join(rng.choice(bases, size=length))
    positions = iter(rng.permutation(length).tolist())

    def mutate(seq, sites):
        out = list(seq)
        for pos in sites:
            out[pos] = "ACGT"[("ACGT".index(out[pos]) + 1) % 4]
        return "".join(out)

    shared = {1: [next(positions) for _ in range(3)], 3: [next(positions) for _ in range(2)]}
    shared[2], shared[4] = shared[1], shared[3]
    patients = [PatientSequences("P0", (base, mutate(base, [next(positions)])))]
    for i in range(1, 9):
        sites = list(shared.get(i, []))
        sites += [next(positions) for _ in range(5 - len(sites))]
        first = mutate(base, sites)
        patients.append(PatientSequences(f"P{i}", (first, mutate(first, [next(positions)]))))
    return patients
