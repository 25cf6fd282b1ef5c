"""Colour coding for free routing, parameterized by the number of commodities.

A small solution (at most 2^k + k vertices, strongly connected pieces
anchored at a source) is guessed as a colour-level *template*; a vertex of
D is viable for a template node when it can play that node's role given the
nodes after it.  Terminals keep one fixed colour in every colouring, so only
the remaining vertices are recoloured across the family.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import InfeasibleExhaustive, InvalidVariant
from .graph_core import Digraph, Edge, strongly_connected_components
from .instance_model import Commodity, Instance, SolveOutcome, Variant, validate_solution
from .rspp_t1 import solve_rspp_target1

UNUSED = -1  # colour of vertices that lie between no source and its destination


def gamma_of(k: int) -> int:
    return 2**k + k


def default_trials(gamma: int, eps: float = 1e-3) -> int:
    if gamma > 700:  # e^gamma overflows a float; no caller could run that many anyway
        return sys.maxsize
    return math.ceil(math.exp(gamma) * math.log(1 / eps))


@dataclass(frozen=True)
class Coloring:
    color_of: tuple[int, ...]
    gamma: int

    def vertices_of(self, color: int) -> list[int]:
        return [v for v, c in enumerate(self.color_of) if c == color]


def _terminal_colors(terminals: Sequence[int]) -> dict[int, int]:
    return {v: i for i, v in enumerate(sorted(terminals))}


def coloring_family(
    d: Digraph,
    terminals: Sequence[int],
    gamma: int,
    mode: str = "exhaustive",
    *,
    seed: int = 0,
    trials: int | None = None,
    cap: int = 200_000,
    free: Sequence[int] | None = None,
) -> Iterator[Coloring]:
    """Colourings agreeing on the terminals; ``free`` limits which other vertices get colours."""
    fixed = _terminal_colors(terminals)
    if len(fixed) > gamma:
        raise ValueError("more terminals than colours")
    free = sorted(v for v in (range(d.n) if free is None else free) if v not in fixed)
    palette = list(range(len(fixed), gamma))
    base = [UNUSED] * d.n
    for v, c in fixed.items():
        base[v] = c
    if not free:
        yield Coloring(tuple(base), gamma)
        return
    if mode == "exhaustive":
        size = len(palette) ** len(free)
        if size > cap:
            raise InfeasibleExhaustive(f"{size} colourings exceed the cap of {cap}")
        for pick in itertools.product(palette, repeat=len(free)):
            col = list(base)
            for v, c in zip(free, pick):
                col[v] = c
            yield Coloring(tuple(col), gamma)
    elif mode == "random":
        rng = random.Random(seed)
        for _ in range(default_trials(gamma) if trials is None else trials):
            col = list(base)
            for v in free:
                col[v] = rng.choice(palette)
            yield Coloring(tuple(col), gamma)
    else:
        raise ValueError(f"unknown colouring mode {mode!r}")


# --- templates -------------------------------------------------------------
#
# Template nodes are terminals (as their own vertex ids) and non-terminal
# colours encoded as ("c", colour).  A node therefore names a colour class of D.


@dataclass(frozen=True)
class Template:
    nodes: tuple
    edges: frozenset
    paths: tuple  # one node sequence per commodity


def _classes(coloring: Coloring, terminals: frozenset[int]) -> dict:
    out: dict = {v: [v] for v in sorted(terminals)}
    for v, c in enumerate(coloring.color_of):
        if v not in terminals and c != UNUSED:
            out.setdefault(("c", c), []).append(v)
    return out


def enumerate_templates(instance: Instance, coloring: Coloring, limit: int = 2_000_000) -> Iterator[Template]:
    """Distinct unions of one s-t node path per commodity, outdegree at most T.

    Consecutive nodes must be realizable somewhere in the closure and every
    node must sit between its commodity's endpoints; both are necessary for
    any node of a real solution, so nothing viable is lost.
    """
    d = instance.graph
    terminals = instance.terminals
    classes = _classes(coloring, terminals)
    nodes = list(classes)
    reach = {(x, y): any(d.reaches(a, b) for a in classes[x] for b in classes[y]) for x in nodes for y in nodes if x != y}
    T = instance.target
    per_commodity = []
    for c in instance.commodities:
        between = [
            x for x in nodes
            if x not in (c.source, c.destination)
            and any(d.reaches(c.source, v) and d.reaches(v, c.destination) for v in classes[x])
        ]
        seqs = []

        def grow(path: list) -> None:
            last = path[-1]
            if reach.get((last, c.destination)):
                seqs.append(tuple(path) + (c.destination,))
            for x in between:
                if x not in path and reach.get((last, x)):
                    path.append(x)
                    grow(path)
                    path.pop()

        grow([c.source])
        if not seqs:
            return
        per_commodity.append(seqs)

    seen: set[frozenset] = set()
    chosen: list[tuple] = []
    count = 0

    def place(i: int, edges: frozenset, deg: dict) -> Iterator[Template]:
        nonlocal count
        if i == len(per_commodity):
            if edges not in seen:
                seen.add(edges)
                used = sorted({x for e in edges for x in e} | set(terminals), key=repr)
                yield Template(tuple(used), edges, tuple(chosen))
            return
        for seq in per_commodity[i]:
            count += 1
            if count > limit:
                raise InfeasibleExhaustive(f"more than {limit} partial templates")
            new = [e for e in zip(seq, seq[1:]) if e not in edges]
            bump = dict(deg)
            for a, _ in new:
                bump[a] = bump.get(a, 0) + 1
            if any(bump[a] > T for a, _ in new):
                continue
            chosen.append(seq)
            yield from place(i + 1, edges | frozenset(new), bump)
            chosen.pop()

    yield from place(0, frozenset(), {})


def _node_graph(template: Template) -> tuple[Digraph, dict]:
    index = {x: i for i, x in enumerate(template.nodes)}
    g = Digraph.from_edges(len(index), [(index[a], index[b]) for a, b in template.edges])
    return g, index


def template_discarded(instance: Instance, template: Template) -> str | None:
    """Reason the template cannot describe a solution, or None."""
    d = instance.graph
    deg: dict = {}
    for a, _ in template.edges:
        deg[a] = deg.get(a, 0) + 1
    if max(deg.values(), default=0) > instance.target:
        return "outdegree"
    g, _ = _node_graph(template)
    sources = instance.sources
    for comp in strongly_connected_components(g).components:
        if len(comp) >= 2 and not any(template.nodes[i] in sources for i in comp):
            return "unanchored cycle"
    terminals = instance.terminals
    for a, b in template.edges:
        if a in terminals and b in terminals and not d.reaches(a, b):
            return "terminal edge outside closure"
    return None


@dataclass
class Viability:
    viable: dict = field(default_factory=dict)  # template node -> viable vertices of D

    def complete(self) -> bool:
        return all(self.viable.values())


def viability(instance: Instance, template: Template, coloring: Coloring) -> Viability | None:
    """Viable vertices per node, working from the back of the SCC order forward.

    Members of an anchored strongly connected piece must reach and be reached
    from its anchor source, and every edge leaving the piece (or leaving a
    node outside any piece) needs a viable partner further down the order.
    """
    d = instance.graph
    terminals = instance.terminals
    sources = instance.sources
    classes = _classes(coloring, terminals)
    g, index = _node_graph(template)
    scc = strongly_connected_components(g)
    comp_of = scc.component_of
    anchor: dict[int, int] = {}
    for cid, comp in enumerate(scc.components):
        if len(comp) >= 2:
            s = min(template.nodes[i] for i in comp if template.nodes[i] in sources)
            anchor[cid] = s
            for i in comp:
                r = template.nodes[i]
                if r in terminals and r != s and not (d.reaches(r, s) and d.reaches(s, r)):
                    return None
    out_nodes: dict = {x: [] for x in template.nodes}
    in_nodes: dict = {x: [] for x in template.nodes}
    for a, b in template.edges:
        out_nodes[a].append(b)
        in_nodes[b].append(a)
    state = Viability({r: [r] for r in terminals})
    order = [template.nodes[i] for comp in scc.components for i in comp]
    for x in reversed(order):
        if x in terminals:
            continue
        cid = comp_of[index[x]]
        ok = []
        for v in classes[x]:
            if cid in anchor and not (d.reaches(v, anchor[cid]) and d.reaches(anchor[cid], v)):
                continue
            outside = [y for y in out_nodes[x] if comp_of[index[y]] != cid]
            if not all(any(d.reaches(v, w) for w in state.viable[y]) for y in outside):
                continue
            if not all(d.reaches(y, v) for y in in_nodes[x] if y in terminals and comp_of[index[y]] != cid):
                continue
            ok.append(v)
        state.viable[x] = ok
        if not ok:
            return state
    return state


def normalize_sccs(instance: Instance, h: Digraph) -> Digraph:
    """Rewrite each source-free strongly connected piece of H as a path.

    Members are chained in ascending index order and edges entering the
    piece are redirected to its first member.  No outdegree grows and every
    vertex reachable before stays reachable, which is why solutions may be
    assumed to have only source-anchored cycles.
    """
    sources = instance.sources
    edges = set(h.edges)
    for comp in strongly_connected_components(h).components:
        if len(comp) < 2 or comp & sources:
            continue
        chain = sorted(comp)
        head = chain[0]
        kept = set()
        for u, v in edges:
            if u in comp and v in comp:
                continue
            kept.add((u, head) if v in comp and u not in comp else (u, v))
        kept.update(zip(chain, chain[1:]))
        edges = kept
    return h.with_edges(edges)


def reconstruct(instance: Instance, template: Template, state: Viability) -> Digraph:
    d = instance.graph
    edges: set[Edge] = set()
    for a, b in sorted(template.edges, key=repr):
        for v in state.viable[a]:
            w = next(w for w in sorted(state.viable[b]) if d.reaches(v, w))
            edges.add((v, w))
    return d.with_edges(edges)


def solve_colorful_rspp(instance: Instance, coloring: Coloring, template_limit: int = 2_000_000) -> Digraph | None:
    if instance.target < 2:
        raise InvalidVariant("the colourful solver expects target >= 2")
    for template in enumerate_templates(instance, coloring, template_limit):
        if template_discarded(instance, template):
            continue
        state = viability(instance, template, coloring)
        if state is None or not state.complete():
            continue
        h = reconstruct(instance, template, state)
        if not validate_solution(instance, h).valid:
            raise RuntimeError("reconstructed graph failed validation")
        return h
    return None


@dataclass(frozen=True)
class ColorCodingConfig:
    mode: str = "exhaustive"
    seed: int = 0
    trials: int | None = None
    max_trials: int = 20_000
    exhaustive_cap: int = 200_000
    template_limit: int = 2_000_000


def relevant_vertices(instance: Instance) -> list[int]:
    """Non-terminals lying on some source-to-destination route of the closure."""
    d = instance.graph
    terminals = instance.terminals
    return [
        v for v in range(d.n)
        if v not in terminals
        and any(d.reaches(c.source, v) and d.reaches(v, c.destination) for c in instance.commodities)
    ]


def solve_rspp_by_commodities(instance: Instance, cfg: ColorCodingConfig | None = None) -> SolveOutcome:
    if instance.variant is not Variant.RSPP:
        raise InvalidVariant("colour coding needs an RSPP instance")
    cfg = cfg or ColorCodingConfig()
    if instance.k == 0:
        return SolveOutcome(True, instance.graph.with_edges(()), {"path": "empty"})
    if instance.target <= 1:
        h = solve_rspp_target1(instance)
        return SolveOutcome(h is not None, h, {"path": "t1"})
    d = instance.graph
    if not all(d.reaches(c.source, c.destination) for c in instance.commodities):
        return SolveOutcome(False, None, {"path": "unroutable"})
    gamma = gamma_of(instance.k)
    trials = cfg.trials if cfg.trials is not None else min(default_trials(gamma), cfg.max_trials)
    family = coloring_family(
        d,
        sorted(instance.terminals),
        gamma,
        cfg.mode,
        seed=cfg.seed,
        trials=trials,
        cap=cfg.exhaustive_cap,
        free=relevant_vertices(instance),
    )
    tried = 0
    for coloring in family:
        tried += 1
        h = solve_colorful_rspp(instance, coloring, cfg.template_limit)
        if h is not None:
            return SolveOutcome(True, h, {"path": "colour coding", "mode": cfg.mode, "colourings": tried})
    return SolveOutcome(False, None, {"path": "colour coding", "mode": cfg.mode, "colourings": tried})
