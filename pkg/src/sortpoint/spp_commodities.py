"""Routed commodities, parameterized by how many there are.

* target <= 1: shrink to the terminals (``kernelize_spp_t1``) and search;
* target >= 2: vertices deep inside long same-type stretches are marked
  flexible (degree-unconstrained) via a Ramsey argument, the flexible
  relaxation is decided by brute force, and a flexible solution is turned
  back into a real one by rerouting through the marked vertex's stretch.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import BudgetExceeded, InvalidVariant
from .graph_core import Digraph, Edge, members
from .instance_model import (
    Commodity,
    Instance,
    PathCover,
    SolveOutcome,
    Variant,
    has_path_within,
    validate_solution,
)
from .oracle import OracleConfig, _membership, _cut, solve_exact

RamBound = Callable[[int, int], int]


def default_ram_bound(r: int, s: int) -> int:
    """Computable upper bound on the r-colour Ramsey number for cliques of size s.

    ``r ** (r * s)`` for r >= 2.  With a single colour every clique is
    monochromatic, so s itself is exact (the power formula would give 1).
    """
    if r <= 1:
        return s
    return r ** (r * s)


def vertex_types(instance: Instance) -> tuple[frozenset[int], ...]:
    """Per vertex, the indices of commodities whose route visits it."""
    types: list[set[int]] = [set() for _ in range(instance.graph.n)]
    for i, c in enumerate(instance.commodities):
        for v in c.route:
            types[v].add(i)
    return tuple(frozenset(t) for t in types)


def _require_spp(instance: Instance) -> None:
    if instance.variant is not Variant.SPP:
        raise InvalidVariant("routed-commodity algorithms need an SPP instance")


# --- kernel for target <= 1 ------------------------------------------------


def _kernel(instance: Instance) -> tuple[Instance, list[int]]:
    d = instance.graph
    keep = sorted(instance.terminals)
    new_index = {v: i for i, v in enumerate(keep)}
    edges = [(new_index[u], new_index[v]) for u in keep for v in keep if u != v and d.reaches(u, v)]
    g = Digraph.from_edges(len(keep), edges, [d.labels[v] for v in keep])
    comms = tuple(
        Commodity(new_index[c.source], new_index[c.destination], tuple(new_index[v] for v in c.route if v in new_index))
        for c in instance.commodities
    )
    return Instance(Variant.SPP, g, comms, instance.target), keep


def kernelize_spp_t1(instance: Instance) -> Instance:
    """Terminals only, closure edges among them, routes with non-terminals deleted.

    Vertex labels survive, so a kernel solution maps back by label.
    """
    _require_spp(instance)
    if instance.target > 1:
        raise InvalidVariant("the terminal kernel is only equivalent for target <= 1")
    return _kernel(instance)[0]


# --- q-enclosure -----------------------------------------------------------


@dataclass(frozen=True)
class EnclosureWitness:
    type_set: frozenset[int]
    chain: tuple[int, ...]  # in the visiting order of the lowest-index route of the type
    center: int


def _positions(instance: Instance) -> list[dict[int, int]]:
    return [{v: i for i, v in enumerate(c.route)} for c in instance.commodities]


def _consistent(chain: Sequence[int], routes: Sequence[dict[int, int]]) -> bool:
    """Every route visits ``chain`` in order or in exact reverse."""
    for pos in routes:
        idx = [pos[v] for v in chain]
        up = all(a < b for a, b in zip(idx, idx[1:]))
        down = all(a > b for a, b in zip(idx, idx[1:]))
        if not (up or down):
            return False
    return True


def _classes(instance: Instance) -> dict[frozenset[int], list[int]]:
    out: dict[frozenset[int], list[int]] = {}
    for v, t in enumerate(vertex_types(instance)):
        if t:
            out.setdefault(t, []).append(v)
    return dict(sorted(out.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))))


def find_q_enclosed(instance: Instance, q: int) -> list[EnclosureWitness]:
    """Every (type, chain) pair certifying a q-enclosure, by subset search."""
    _require_spp(instance)
    pos = _positions(instance)
    found = []
    for u_set, cls in _classes(instance).items():
        first = min(u_set)
        routes = [pos[i] for i in sorted(u_set)]
        for subset in itertools.combinations(cls, 2 * q + 1):
            chain = tuple(sorted(subset, key=pos[first].__getitem__))
            if _consistent(chain, routes):
                found.append(EnclosureWitness(u_set, chain, chain[q]))
    return found


# --- Ramsey marking --------------------------------------------------------


def _label(u: int, v: int, first: dict[int, int], others: Sequence[dict[int, int]]) -> tuple[bool, ...]:
    if first[u] > first[v]:
        u, v = v, u
    return tuple(pos[u] > pos[v] for pos in others)


def ramsey_mark_witnessed(instance: Instance, q: int, ram_bound: RamBound = default_ram_bound) -> dict[int, EnclosureWitness]:
    _require_spp(instance)
    pos = _positions(instance)
    marked: dict[int, EnclosureWitness] = {}
    size = 2 * q + 1
    for u_set, cls in _classes(instance).items():
        order = sorted(u_set)
        first, others = pos[order[0]], [pos[i] for i in order[1:]]
        need = ram_bound(2 ** (len(u_set) - 1), size)
        while True:
            free = [v for v in cls if v not in marked]
            if len(free) < need or need < size:
                break
            pool = free[:need]
            hit = None
            for subset in itertools.combinations(pool, size):
                labels = {_label(a, b, first, others) for a, b in itertools.combinations(subset, 2)}
                if len(labels) == 1:
                    hit = subset
                    break
            if hit is None:
                # only possible when ram_bound is not a true upper bound
                break
            chain = tuple(sorted(hit, key=first.__getitem__))
            marked[chain[q]] = EnclosureWitness(u_set, chain, chain[q])
    return marked


def ramsey_mark(instance: Instance, q: int, ram_bound: RamBound = default_ram_bound) -> frozenset[int]:
    """Vertices marked as q-enclosed centres; each has a monochromatic chain behind it."""
    return frozenset(ramsey_mark_witnessed(instance, q, ram_bound))


# --- flexible relaxation ---------------------------------------------------


@dataclass(frozen=True)
class SmdInstance:
    graph: Digraph
    flexible: frozenset[int]
    commodities: tuple[Commodity, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "flexible", frozenset(self.flexible))
        if not all(0 <= v < self.graph.n for v in self.flexible):
            raise ValueError("flexible vertices must belong to the graph")

    def as_instance(self) -> Instance:
        return Instance(Variant.SPP, self.graph, self.commodities, self.target)


def smd_valid(smd: SmdInstance, edges) -> bool:
    """Closure containment, degree bound outside F, and a routed witness per commodity."""
    d = smd.graph
    edges = set(edges)
    if not all(d.reaches(u, v) for u, v in edges):
        return False
    deg = [0] * d.n
    out = [0] * d.n
    for u, v in edges:
        deg[u] += 1
        out[u] |= 1 << v
    if any(deg[v] > smd.target for v in range(d.n) if v not in smd.flexible):
        return False
    return all(has_path_within(out, c.route) for c in smd.commodities)


def _smd_parts(smd: SmdInstance) -> tuple[list[list[int]], set[Edge]]:
    d = smd.graph
    flex = smd.flexible
    rigid_edges = [(u, v) for u, v in d.edges if u not in flex]
    d_prime = d.with_edges(rigid_edges)
    dests = {c.destination for c in smd.commodities}
    e_tilde = {(v, t) for v in flex for t in dests if v != t and d.reaches(v, t)}
    useful = set()
    for c in smd.commodities:
        r = c.route
        useful.update((r[i], r[j]) for i in range(len(r)) for j in range(i + 1, len(r)))
    rows: list[list[int]] = [[] for _ in range(d.n)]
    for u in range(d.n):
        if u in flex:
            continue
        for v in members(d_prime.reach_bits[u]):
            if v != u and (u, v) in useful:
                rows[u].append(v)
    return rows, e_tilde


def _smd_by_subsets(smd: SmdInstance, budget: int) -> set[Edge] | None:
    rows, e_tilde = _smd_parts(smd)
    T = smd.target
    options = [[tuple(r)] if len(r) <= T else list(itertools.combinations(r, T)) for r in rows]
    if math.prod(len(o) for o in options) > budget:
        raise BudgetExceeded("edge-subset scan too large")
    for pick in itertools.product(*options):
        h = set(e_tilde)
        h.update((u, v) for u, ts in enumerate(pick) for v in ts)
        if smd_valid(smd, h):
            return h
    return None


def _smd_by_covers(smd: SmdInstance, budget: int) -> set[Edge] | None:
    """Witness-by-witness search, each witness grown forward along its route.

    A commodity already served by the edges chosen so far is skipped, since
    any other witness could only add edges.
    """
    rows, e_tilde = _smd_parts(smd)
    allowed = e_tilde | {(u, v) for u, r in enumerate(rows) for v in r}
    T = smd.target
    n = smd.graph.n
    deg = [0] * n
    out = [0] * n
    for u, v in e_tilde:
        out[u] |= 1 << v
    used: set[Edge] = set()
    work = 0
    comms = smd.commodities

    def take(e: Edge) -> None:
        used.add(e)
        deg[e[0]] += 1
        out[e[0]] |= 1 << e[1]

    def drop(e: Edge) -> None:
        used.discard(e)
        deg[e[0]] -= 1
        out[e[0]] &= ~(1 << e[1])

    def place(i: int) -> bool:
        if i == len(comms):
            return True
        route = comms[i].route
        if has_path_within(out, route):
            return place(i + 1)
        return walk(i, route, 0)

    def walk(i: int, route, j: int) -> bool:
        nonlocal work
        u = route[j]
        if j == len(route) - 1:
            return place(i + 1)
        for jj in range(j + 1, len(route)):
            v = route[jj]
            if (u, v) not in allowed:
                continue
            work += 1
            if work > budget:
                raise BudgetExceeded("flexible cover search too large")
            if out[u] >> v & 1:
                if walk(i, route, jj):
                    return True
                continue
            if deg[u] >= T:
                continue
            take((u, v))
            if walk(i, route, jj):
                return True
            drop((u, v))
        return False

    if place(0):
        return used | e_tilde
    return None


def solve_smd_spp(smd: SmdInstance, cfg: OracleConfig | None = None, method: str = "auto") -> Digraph | None:
    """Decide the flexible relaxation; the graph returned is E+ together with the flexible shortcut edges.

    ``subsets`` scans E+ over the closure of the rigid part (per vertex only
    maximal choices, which is exact because extra edges never hurt).
    ``covers`` searches witness combinations inside the same edge universe,
    which decides the same question.  ``auto`` uses the subset scan when it is
    within budget.
    """
    cfg = cfg or OracleConfig()
    if method == "subsets":
        h = _smd_by_subsets(smd, cfg.max_product)
    elif method == "covers":
        h = _smd_by_covers(smd, cfg.max_product)
    else:
        try:
            h = _smd_by_subsets(smd, min(cfg.max_product, 200_000))
        except BudgetExceeded:
            h = _smd_by_covers(smd, cfg.max_product)
    return None if h is None else smd.graph.with_edges(h)


# --- lifting a flexible solution to a real one ------------------------------


def _route_witness(out: Sequence[int], route: Sequence[int]) -> tuple[int, ...] | None:
    """Fewest-hop path from route[0] to route[-1] through forward pairs of ``route``."""
    pos = {v: i for i, v in enumerate(route)}
    prev = {route[0]: None}
    frontier = [route[0]]
    while frontier:
        nxt = []
        for v in frontier:
            for w in members(out[v]):
                if w in pos and pos[w] > pos[v] and w not in prev:
                    prev[w] = v
                    nxt.append(w)
        frontier = nxt
    if route[-1] not in prev:
        return None
    path = [route[-1]]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return tuple(reversed(path))


def _compact_core(cover: PathCover, sources: frozenset[int]) -> PathCover:
    while True:
        q = _membership(cover, sources)
        pair = next(((u, v) for u, v in itertools.combinations(sorted(q), 2) if q[u] == q[v]), None)
        if pair is None:
            return cover
        u, v = pair
        cover = PathCover(
            tuple(
                (_cut(w, u, v) if w.index(u) < w.index(v) else _cut(w, v, u)) if i in q[u] else w
                for i, w in enumerate(cover.witnesses)
            )
        )


def _reroute(instance: Instance, cover: PathCover, wit: EnclosureWitness, q: int) -> PathCover:
    """Free the flexible centre ``wit.center`` by sending its traffic along the chain."""
    T = instance.target
    v = wit.center
    chain = wit.chain
    k = instance.k
    new: list[tuple[int, ...] | None] = [None] * k
    edges: set[Edge] = set()
    prefix: dict[int, tuple[int, ...]] = {}
    for i, w in enumerate(cover.witnesses):
        if v in w:
            prefix[i] = w[: w.index(v) + 1]
            edges.update(zip(prefix[i], prefix[i][1:]))
        else:
            new[i] = w
            edges.update(zip(w, w[1:]))

    def degree(x: int) -> int:
        return sum(1 for a, _ in edges if a == x)

    right, left = [], []
    for i in sorted(prefix):
        pos = {u: j for j, u in enumerate(instance.commodities[i].route)}
        (right if pos[chain[0]] < pos[chain[-1]] else left).append(i)

    def serve(group: list[int], steps: list[int]) -> None:
        room = {j: T - degree(chain[j]) for j in steps}
        hops = [q]
        here = q
        pending = list(group)
        while pending:
            p = next((j for j in steps if (j > here if steps[0] > q else j < here) and room[j] > 0), None)
            if p is None:
                raise RuntimeError("enclosure chain has no free vertex left")
            edges.add((chain[here], chain[p]))
            hops.append(p)
            if len(pending) > room[p]:
                take, pending = pending[: room[p] - 1], pending[room[p] - 1 :]
            else:
                take, pending = pending, []
            through = tuple(chain[j] for j in hops[1:])
            for i in take:
                t = instance.commodities[i].destination
                tail = through if chain[p] == t else through + (t,)
                if chain[p] != t:
                    edges.add((chain[p], t))
                new[i] = prefix[i] + tail
            here = p

    serve(right, list(range(q + 1, 2 * q + 1)))
    serve(left, list(range(q - 1, -1, -1)))
    return PathCover(tuple(new))


def lift_flexible_solution(
    instance: Instance, h: Digraph, witnesses_by_vertex: dict[int, EnclosureWitness], q: int
) -> Digraph | None:
    """Turn a flexible-relaxation solution into a solution of the original instance."""
    out = [0] * instance.graph.n
    for u, v in h.edges:
        out[u] |= 1 << v
    ws = []
    for c in instance.commodities:
        w = _route_witness(out, c.route)
        if w is None:
            return None
        ws.append(w)
    cover = _compact_core(PathCover(tuple(ws)), instance.sources)
    for v in sorted(set(witnesses_by_vertex) & cover.vertices()):
        cover = _reroute(instance, cover, witnesses_by_vertex[v], q)
    return instance.graph.with_edges(cover.edges())


# --- full pipeline ---------------------------------------------------------


@dataclass(frozen=True)
class SppConfig:
    oracle: OracleConfig = field(default_factory=OracleConfig)
    ram_bound: RamBound = default_ram_bound
    smd_method: str = "auto"


def enclosure_q(k: int, target: int) -> int:
    return math.ceil((2**k + k) * (1 + k / (target - 1)))


def prune_untyped(instance: Instance) -> Instance:
    """Drop edges that lie on no route; vertices of empty type end up isolated."""
    used = {e for c in instance.commodities for e in zip(c.route, c.route[1:])}
    return Instance(Variant.SPP, instance.graph.with_edges(used), instance.commodities, instance.target)


def solve_spp_by_commodities(instance: Instance, cfg: SppConfig | None = None) -> SolveOutcome:
    _require_spp(instance)
    cfg = cfg or SppConfig()
    k, T = instance.k, instance.target
    if k == 0:
        return SolveOutcome(True, instance.graph.with_edges(()), {"path": "empty"})
    if T <= 1:
        kern, keep = _kernel(instance)
        cover = solve_exact(kern, cfg.oracle)
        if cover is None:
            return SolveOutcome(False, None, {"path": "kernel", "kernel_size": kern.graph.n})
        h = instance.graph.with_edges((keep[a], keep[b]) for a, b in cover.edges())
        return SolveOutcome(True, h, {"path": "kernel", "kernel_size": kern.graph.n})

    pruned = prune_untyped(instance)
    typed = sum(1 for t in vertex_types(pruned) if t)
    q = enclosure_q(k, T)
    if typed <= q:
        cover = solve_exact(pruned, cfg.oracle)
        h = None if cover is None else instance.graph.with_edges(cover.edges())
        return SolveOutcome(cover is not None, h, {"path": "small", "q": q})

    marks = ramsey_mark_witnessed(pruned, q, cfg.ram_bound)
    smd = SmdInstance(pruned.graph, frozenset(marks), pruned.commodities, T)
    h = solve_smd_spp(smd, cfg.oracle, cfg.smd_method)
    detail = {"path": "flexible", "q": q, "flexible": sorted(marks)}
    if h is None:
        return SolveOutcome(False, None, detail)
    lifted = lift_flexible_solution(pruned, h, marks, q)
    if lifted is None or not validate_solution(instance, lifted).valid:
        raise RuntimeError("could not turn the flexible solution into a real one")
    return SolveOutcome(True, instance.graph.with_edges(lifted.edges), detail)
