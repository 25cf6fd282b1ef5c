"""Hardness gadgets as instance generators.

* ``gen_3partition``: an oriented tree of degree at most 4, target 2, from
  a 3-Partition input;
* ``gen_3sat22_rspp_pl``: path length 4, degree at most 7, target 2, from a
  formula where each literal occurs exactly twice;
* ``gen_3sat22_spp``: routed, path length 5, degree at most 11, target 4.

Each generator has a matching witness builder that turns a solution of the
source problem into a solution graph, and ``check_reduction`` verifies the
structural claims about the generated graph.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import networkx as nx
import yaml

from .errors import InvalidInput, InvalidSourceSolution
from .graph_core import Digraph, Edge
from .instance_model import Commodity, Instance, Variant, base_paths


# --- source problems -------------------------------------------------------


@dataclass(frozen=True)
class ThreePartitionInput:
    m: int
    B: int
    ints: tuple[int, ...]
    strict: bool = True  # False skips the size window and distinctness, for tiny test inputs

    def __post_init__(self):
        object.__setattr__(self, "ints", tuple(self.ints))
        problems = self.problems()
        if problems:
            raise InvalidInput("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if self.m <= 0 or self.B <= 0:
            out.append("m and B must be positive")
        if len(self.ints) != 3 * self.m:
            out.append(f"need {3 * self.m} integers, got {len(self.ints)}")
        if any(x <= 0 for x in self.ints):
            out.append("integers must be positive")
        if sum(self.ints) != self.m * self.B:
            out.append("integers must sum to m*B")
        if self.strict:
            if len(set(self.ints)) != len(self.ints):
                out.append("integers must be distinct")
            if not all(4 * x > self.B and 2 * x < self.B for x in self.ints):
                out.append("every integer must lie strictly between B/4 and B/2")
        return out


Literal = tuple[int, bool]  # (variable index, positive?)


@dataclass(frozen=True)
class Sat22Formula:
    n: int
    clauses: tuple[tuple[Literal, Literal, Literal], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple((int(v), bool(s)) for v, s in c) for c in self.clauses))
        for c in self.clauses:
            if len(c) != 3:
                raise InvalidInput("every clause needs exactly three literals")
            if any(not 0 <= v < self.n for v, _ in c):
                raise InvalidInput("literal names an unknown variable")
            if len({v for v, _ in c}) != 3:
                raise InvalidInput("a clause must use three different variables")
        count: dict[Literal, int] = {}
        for c in self.clauses:
            for lit in c:
                count[lit] = count.get(lit, 0) + 1
        for v in range(self.n):
            for sign in (True, False):
                if count.get((v, sign), 0) != 2:
                    raise InvalidInput(f"literal {'' if sign else '~'}x{v + 1} must occur exactly twice")

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[v] == s for v, s in c) for c in self.clauses)


def random_sat22(n: int, rng: random.Random, tries: int = 10_000) -> Sat22Formula:
    """A random formula with every literal exactly twice; n must be a multiple of 3."""
    if n % 3:
        raise InvalidInput("each literal twice with 3-literal clauses needs n divisible by 3")
    slots = [(v, s) for v in range(n) for s in (True, False) for _ in range(2)]
    for _ in range(tries):
        rng.shuffle(slots)
        clauses = [tuple(slots[i : i + 3]) for i in range(0, len(slots), 3)]
        if all(len({v for v, _ in c}) == 3 for c in clauses):
            return Sat22Formula(n, tuple(clauses))
    raise InvalidInput("could not place literals into clauses")


def solve_source_problem(source):
    """Triples (as value tuples) for 3-Partition, or an assignment for a formula; None if impossible."""
    if isinstance(source, ThreePartitionInput):
        return _solve_3partition(source)
    if isinstance(source, Sat22Formula):
        for bits in itertools.product((False, True), repeat=source.n):
            if source.satisfied_by(bits):
                return bits
        return None
    raise TypeError("unsupported source problem")


def _solve_3partition(inp: ThreePartitionInput):
    values = sorted(inp.ints)

    def split(rest: list[int]):
        if not rest:
            return []
        first = rest[0]
        for j, k in itertools.combinations(range(1, len(rest)), 2):
            if first + rest[j] + rest[k] == inp.B:
                remaining = [x for i, x in enumerate(rest) if i not in (0, j, k)]
                tail = split(remaining)
                if tail is not None:
                    return [(first, rest[j], rest[k])] + tail
        return None

    found = split(values)
    return None if found is None else tuple(found)


# --- helpers ---------------------------------------------------------------


class _GraphBuilder:
    def __init__(self):
        self.labels: list[str] = []
        self.index: dict[str, int] = {}
        self.edges: list[Edge] = []
        self.comms: list[tuple[str, str, tuple[str, ...] | None]] = []

    def v(self, name: str) -> int:
        if name not in self.index:
            self.index[name] = len(self.labels)
            self.labels.append(name)
        return self.index[name]

    def e(self, a: str, b: str) -> None:
        edge = (self.v(a), self.v(b))
        if edge not in self.edges:
            self.edges.append(edge)

    def k(self, s: str, t: str, route: Sequence[str] | None = None) -> None:
        self.comms.append((s, t, None if route is None else tuple(route)))

    def build(self, variant: Variant, target: int, path_length: int | None = None) -> Instance:
        g = Digraph.from_edges(len(self.labels), self.edges, self.labels)
        comms = tuple(
            Commodity(self.index[s], self.index[t], None if r is None else tuple(self.index[x] for x in r))
            for s, t, r in self.comms
        )
        return Instance(variant, g, comms, target, path_length)


def _tree_path(d: Digraph, s: int, t: int) -> tuple[int, ...]:
    prev = {s: None}
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for w in d.succ[u]:
                if w not in prev:
                    prev[w] = u
                    nxt.append(w)
        frontier = nxt
    path = [t]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return tuple(reversed(path))


def _named(instance: Instance, pairs) -> list[Edge]:
    index = {lab: i for i, lab in enumerate(instance.graph.labels)}
    return [(index[a], index[b]) for a, b in pairs]


# --- 3-Partition -------------------------------------------------------------


def _w(i: int, j: int) -> str:
    return f"w_{i}^{j}"


def _r(i: int, j: int) -> str:
    return f"r_{i}^{j}"


def gen_3partition(inp: ThreePartitionInput, routed: bool = False) -> Instance:
    if not isinstance(inp, ThreePartitionInput):
        raise InvalidInput("expected a ThreePartitionInput")
    m, B, ints = inp.m, inp.B, inp.ints
    g = _GraphBuilder()
    main = []
    for i in range(1, m + 1):
        main += [f"s_{i}", f"s'_{i}"]
    for i, n_i in enumerate(ints, 1):
        main += [_w(i, j) for j in range(1, n_i + 1)]
    for i in range(1, m + 1):
        main += [_r(i, j) for j in range(1, B + 1)]
    for name in main:
        g.v(name)
    for a, b in zip(main, main[1:]):
        g.e(a, b)
    for i in range(1, m + 1):
        g.k(f"s_{i}", f"s'_{i}")
        for j in range(1, B + 1):
            g.k(f"s_{i}", _r(i, j))
    for i, n_i in enumerate(ints, 1):
        for j in range(1, n_i):
            g.k(_w(i, j), _w(i, j + 1))
        g.e(_w(i, n_i), f"w~_{i}")
        g.k(_w(i, n_i), f"w~_{i}")
    for i in range(1, m + 1):
        for j in range(1, B + 1):
            for extra in (f"r~_{i}^{j}", f"r-_{i}^{j}"):
                g.e(_r(i, j), extra)
                g.k(_r(i, j), extra)
    inst = g.build(Variant.RSPP, 2)
    if not routed:
        return inst
    d = inst.graph
    comms = tuple(Commodity(c.source, c.destination, _tree_path(d, c.source, c.destination)) for c in inst.commodities)
    return Instance(Variant.SPP, d, comms, 2)


def _witness_3partition(instance: Instance, inp: ThreePartitionInput, triples) -> Digraph:
    m, B, ints = inp.m, inp.B, inp.ints
    triples = [tuple(t) for t in triples]
    if len(triples) != m or sorted(x for t in triples for x in t) != sorted(ints):
        raise InvalidSourceSolution("triples must use every integer exactly once")
    if any(len(t) != 3 or sum(t) != B for t in triples):
        raise InvalidSourceSolution("every triple must sum to B")
    # map values to (distinct) integer positions; with repeated values take them in order
    free = {}
    for pos, val in enumerate(ints, 1):
        free.setdefault(val, []).append(pos)
    pairs = []
    for i in range(1, m + 1):
        pairs.append((f"s_{i}", f"s'_{i}"))
        for j in range(1, B + 1):
            pairs += [(_r(i, j), f"r~_{i}^{j}"), (_r(i, j), f"r-_{i}^{j}")]
    for i, n_i in enumerate(ints, 1):
        pairs += [(_w(i, j), _w(i, j + 1)) for j in range(1, n_i)]
        pairs.append((_w(i, n_i), f"w~_{i}"))
    for i, triple in enumerate(triples, 1):
        a, b, c = (free[val].pop(0) for val in triple)
        pairs += [(f"s_{i}", _w(a, 1)), (f"s'_{i}", _w(b, 1)), (f"s'_{i}", _w(c, 1))]
        offset = 0
        for idx in (a, b, c):
            n_idx = ints[idx - 1]
            pairs += [(_w(idx, j), _r(i, j + offset)) for j in range(1, n_idx + 1)]
            offset += n_idx
    return instance.graph.with_edges(_named(instance, pairs))


# --- 3-SAT-(2,2), free routing with path length ----------------------------


def _lit(lit: Literal) -> str:
    v, positive = lit
    return f"x{v + 1}" if positive else f"~x{v + 1}"


def gen_3sat22_rspp_pl(f: Sat22Formula) -> Instance:
    if not isinstance(f, Sat22Formula):
        raise InvalidInput("expected a Sat22Formula")
    g = _GraphBuilder()
    for v in range(f.n):
        x, nx_, s = f"x{v + 1}", f"~x{v + 1}", f"s_x{v + 1}"
        t, t1, t2 = f"t_x{v + 1}", f"t'_x{v + 1}", f"t''_x{v + 1}"
        for a, b in ((s, x), (s, nx_), (x, t), (x, t1), (nx_, t1), (nx_, t2)):
            g.e(a, b)
        for dest in (t, t1, t2):
            g.k(s, dest)
    for j, clause in enumerate(f.clauses, 1):
        c, c1, tc = f"c{j}", f"c{j}'", f"t_c{j}"
        l1, l2, l3 = (_lit(lit) for lit in clause)
        for a, b in ((c, c1), (c, l1), (c1, l2), (c1, l3), (l1, tc), (l2, tc), (l3, tc)):
            g.e(a, b)
        for dest in (l1, l2, l3, tc):
            g.k(c, dest)
    return g.build(Variant.RSPP_PL, 2, 4)


def _pl_variable_edges(v: int, value: bool) -> list[tuple[str, str]]:
    x, nx_, s = f"x{v + 1}", f"~x{v + 1}", f"s_x{v + 1}"
    t, t1, t2 = f"t_x{v + 1}", f"t'_x{v + 1}", f"t''_x{v + 1}"
    if value:
        return [(s, nx_), (s, t), (nx_, t1), (nx_, t2)]
    return [(s, x), (s, t2), (x, t), (x, t1)]


def _pl_clause_edges(j: int, clause, true_pos: int) -> list[tuple[str, str]]:
    c, c1, tc = f"c{j}", f"c{j}'", f"t_c{j}"
    l1, l2, l3 = (_lit(lit) for lit in clause)
    return [(c, c1), (c, l1), (c1, l2), (c1, l3), (_lit(clause[true_pos]), tc)]


# --- 3-SAT-(2,2), routed ------------------------------------------------------


def _spp_names(j: int) -> tuple[str, str, str, str]:
    return f"c{j}", f"c{j}'", f"c{j}''", f"c{j}~"


def gen_3sat22_spp(f: Sat22Formula) -> Instance:
    if not isinstance(f, Sat22Formula):
        raise InvalidInput("expected a Sat22Formula")
    g = _GraphBuilder()
    for v in range(f.n):
        x, nx_, s = f"x{v + 1}", f"~x{v + 1}", f"s_x{v + 1}"
        g.e(s, x)
        g.e(x, nx_)
        for i in range(1, 4):
            g.e(x, f"t{i}^x{v + 1}")
            g.k(s, f"t{i}^x{v + 1}", (s, x, f"t{i}^x{v + 1}"))
        for i in range(1, 5):
            g.e(nx_, f"t{i}^~x{v + 1}")
            g.k(s, f"t{i}^~x{v + 1}", (s, x, nx_, f"t{i}^~x{v + 1}"))
    for j, clause in enumerate(f.clauses, 1):
        c, c1, c2, ct = _spp_names(j)
        for a, b in ((c, c1), (c1, c2), (c2, ct)):
            g.e(a, b)
        for a in (c, c1, c2, ct):
            for i in (1, 2):
                g.e(a, f"t{i}^{a}")
                g.k(a, f"t{i}^{a}", (a, f"t{i}^{a}"))
        g.k(c, c1, (c, c1))
        g.k(c1, c2, (c1, c2))
        for lit in clause:
            a = _lit(lit)
            g.e(ct, a)
            for i in (1, 2):
                sink = f"t{i}^{c},{a}"
                g.e(a, sink)
                g.k(c, sink, (c, c1, c2, ct, a, sink))
    return g.build(Variant.SPP, 4)


def _spp_variable_edges(v: int, value: bool) -> list[tuple[str, str]]:
    x, nx_, s = f"x{v + 1}", f"~x{v + 1}", f"s_x{v + 1}"
    if value:
        return [(s, nx_)] + [(s, f"t{i}^x{v + 1}") for i in range(1, 4)] + [(nx_, f"t{i}^~x{v + 1}") for i in range(1, 5)]
    return (
        [(s, x), (x, f"t4^~x{v + 1}")]
        + [(x, f"t{i}^x{v + 1}") for i in range(1, 4)]
        + [(s, f"t{i}^~x{v + 1}") for i in range(1, 4)]
    )


def _spp_clause_edges(j: int, clause, true_pos: int) -> list[tuple[str, str]]:
    c, c1, c2, ct = _spp_names(j)
    lits = [_lit(lit) for lit in clause]
    x = lits[true_pos]
    y, z = [a for i, a in enumerate(lits) if i != true_pos]
    pairs = [(a, f"t{i}^{a}") for a in (c, c1, c2, ct) for i in (1, 2)]
    pairs += [(c, c1), (c1, c2), (c, ct), (c1, x)]
    pairs += [(x, f"t{i}^{c},{x}") for i in (1, 2)]
    pairs += [(c2, f"t{i}^{c},{y}") for i in (1, 2)]
    pairs += [(ct, f"t{i}^{c},{z}") for i in (1, 2)]
    return pairs


# --- witnesses -------------------------------------------------------------


def witness_from_source_solution(generated: Instance, source, source_solution) -> Digraph:
    """The solution graph the hardness argument builds from a source solution."""
    if isinstance(source, ThreePartitionInput):
        return _witness_3partition(generated, source, source_solution)
    if not isinstance(source, Sat22Formula):
        raise TypeError("unsupported source problem")
    assignment = tuple(bool(b) for b in source_solution)
    if len(assignment) != source.n or not source.satisfied_by(assignment):
        raise InvalidSourceSolution("assignment does not satisfy the formula")
    routed = generated.variant is Variant.SPP
    var_edges = _spp_variable_edges if routed else _pl_variable_edges
    clause_edges = _spp_clause_edges if routed else _pl_clause_edges
    pairs = []
    for v in range(source.n):
        pairs += var_edges(v, assignment[v])
    for j, clause in enumerate(source.clauses, 1):
        true_pos = next(i for i, (v, s) in enumerate(clause) if assignment[v] == s)
        pairs += clause_edges(j, clause, true_pos)
    return generated.graph.with_edges(set(_named(generated, pairs)))


# --- structural checks -------------------------------------------------------


@dataclass
class GadgetReport:
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)
    # remarks the construction is expected to match but that do not gate the report
    flags: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks[name] = bool(ok)
        if detail:
            self.details[name] = detail


def _undirected(d: Digraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(d.n))
    g.add_edges_from(d.edges)
    return g


def _max_degree(d: Digraph) -> int:
    return max((deg for _, deg in _undirected(d).degree), default=0)


def _simple_paths(d: Digraph, s: int, t: int) -> list[tuple[int, ...]]:
    g = nx.DiGraph()
    g.add_nodes_from(range(d.n))
    g.add_edges_from(d.edges)
    return [tuple(p) for p in nx.all_simple_paths(g, s, t)]


def _all_in_closure(d: Digraph, edges) -> bool:
    return all(d.reaches(u, v) for u, v in edges)


def check_reduction(generated: Instance, source) -> GadgetReport:
    rep = GadgetReport()
    d = generated.graph
    index = {lab: i for i, lab in enumerate(d.labels)}
    rep.record("commodities routable", all(d.reaches(c.source, c.destination) for c in generated.commodities))
    if isinstance(source, ThreePartitionInput):
        m, B = source.m, source.B
        und = _undirected(d)
        rep.record("underlying tree", nx.is_tree(und))
        rep.record("max degree <= 4", _max_degree(d) <= 4, str(_max_degree(d)))
        rep.record("vertex count", d.n == (2 * m * B + 2 * m) + 3 * m + 2 * m * B, str(d.n))
        expected_k = m * (B + 1) + sum(x - 1 for x in source.ints) + 3 * m + 2 * m * B
        rep.record("commodity count", generated.k == expected_k, f"{generated.k} vs {expected_k}")
        rep.record("target 2", generated.target == 2)
        if generated.variant is Variant.SPP:
            rep.record(
                "routes are the tree paths",
                all(c.route == _tree_path(d, c.source, c.destination) for c in generated.commodities),
            )
        return rep
    if not isinstance(source, Sat22Formula):
        raise TypeError("unsupported source problem")
    if generated.variant is Variant.RSPP_PL:
        rep.record("max degree <= 7", _max_degree(d) <= 7, str(_max_degree(d)))
        rep.record("target 2", generated.target == 2)
        rep.record("path length 4", generated.path_length == 4)
        short = all(
            next(base_paths(d, c.source, c.destination, 4), None) is not None for c in generated.commodities
        )
        rep.record("every commodity has a base path of length <= 4", short)
        lits = [index[_lit((v, s))] for v in range(source.n) for s in (True, False)]
        in_deg = [sum(1 for _, b in d.edges if b == x) for x in lits]
        out_deg = [d.out_degree(x) for x in lits]
        rep.record("literals have 3 in- and 4 out-edges", all(i == 3 for i in in_deg) and all(o == 4 for o in out_deg))
        tables = []
        for v in range(source.n):
            tables += _pl_variable_edges(v, True) + _pl_variable_edges(v, False)
        for j, clause in enumerate(source.clauses, 1):
            for pos in range(3):
                tables += _pl_clause_edges(j, clause, pos)
        rep.record("witness tables inside the closure", _all_in_closure(d, _named(generated, tables)))
        return rep
    # routed formula gadget
    rep.record("max degree <= 11", _max_degree(d) <= 11, str(_max_degree(d)))
    rep.record("target 4", generated.target == 4)
    rep.record("routes of length <= 5", generated.effective_path_length <= 5, str(generated.effective_path_length))
    unique = True
    for c in generated.commodities:
        paths = _simple_paths(d, c.source, c.destination)
        label = d.labels[c.destination]
        if "," in label:
            lit_vertex = index[label.split(",", 1)[1]]
            paths = [p for p in paths if lit_vertex in p]
        if paths != [c.route]:
            unique = False
            rep.details.setdefault("designated path unique", f"{d.labels[c.source]}->{label}: {len(paths)} paths")
    rep.record("designated path unique", unique)
    tables = []
    for v in range(source.n):
        tables += _spp_variable_edges(v, True) + _spp_variable_edges(v, False)
    for j, clause in enumerate(source.clauses, 1):
        for pos in range(3):
            tables += _spp_clause_edges(j, clause, pos)
    rep.record("witness tables inside the closure", _all_in_closure(d, _named(generated, tables)))
    tilde = [index[_spp_names(j)[3]] for j in range(1, len(source.clauses) + 1)]
    rep.flags["c~ has 3 in- and 8 out-edges"] = all(
        sum(1 for _, b in d.edges if b == x) == 3 and d.out_degree(x) == 8 for x in tilde
    )
    lits = [index[_lit((v, s))] for v in range(source.n) for s in (True, False)]
    rep.flags["literals have 3 in- and 8 out-edges"] = all(
        sum(1 for _, b in d.edges if b == x) == 3 and d.out_degree(x) == 8 for x in lits
    )
    return rep


def sat22_from_literals(n: int, clauses: Sequence[Sequence[int]]) -> Sat22Formula:
    """DIMACS-style clauses (signed 1-based integers) to a formula."""
    return Sat22Formula(n, tuple(tuple((abs(x) - 1, x > 0) for x in c) for c in clauses))


def sample_formula() -> Sat22Formula:
    """Smallest legal shape: three variables, four clauses."""
    return sat22_from_literals(3, [(1, 2, 3), (1, -2, -3), (-1, 2, -3), (-1, -2, 3)])


def parse_source(text: str):
    """Small text documents for the source problems.

    ``3partition: {m: .., B: .., ints: [...]}`` or
    ``sat22: {n: .., clauses: [[1, -2, 3], ...]}`` (YAML).
    """
    data = yaml.safe_load(text)
    if not isinstance(data, Mapping) or len(data) != 1:
        raise InvalidInput("source document must have a single top-level key")
    (kind, body), = data.items()
    if kind == "3partition":
        return ThreePartitionInput(int(body["m"]), int(body["B"]), tuple(body["ints"]), bool(body.get("strict", True)))
    if kind == "sat22":
        return sat22_from_literals(int(body["n"]), body["clauses"])
    raise InvalidInput(f"unknown source kind {kind!r}")
