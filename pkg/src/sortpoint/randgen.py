"""Seeded instance generators and small exhaustive enumerations."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Iterator, Sequence

import networkx as nx

from .graph_core import Digraph
from .instance_model import Commodity, Instance, PathCover, Variant, base_paths
from .spp_commodities import SmdInstance
from .treedec import exact_elimination_order


def random_digraph(rng: random.Random, n: int, density: float = 0.3) -> Digraph:
    return Digraph.from_edges(n, [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < density])


def random_walk_route(rng: random.Random, d: Digraph, start: int, max_edges: int) -> tuple[int, ...]:
    path = [start]
    for _ in range(max_edges):
        options = [w for w in d.succ[path[-1]] if w not in path]
        if not options:
            break
        path.append(rng.choice(options))
    return tuple(path)


def random_pairs(rng: random.Random, d: Digraph, k: int, reachable: bool = True) -> list[tuple[int, int]]:
    pool = [(s, t) for s in range(d.n) for t in range(d.n) if s != t and (not reachable or d.reaches(s, t))]
    return sorted(rng.sample(pool, min(k, len(pool))))


def random_instance(
    rng: random.Random,
    variant: Variant,
    n: int,
    k: int,
    target: int,
    density: float = 0.3,
    p: int | None = None,
    max_route: int = 4,
) -> Instance:
    """A random instance; commodities are routable, via random walks for SPP."""
    variant = Variant(variant)
    for attempt in range(100):
        d = random_digraph(rng, n, density)
        if variant is Variant.SPP:
            routes = []
            for _ in range(k * 4):
                if len(routes) == k:
                    break
                r = random_walk_route(rng, d, rng.randrange(n), rng.randint(1, max_route))
                if len(r) >= 2 and r not in routes:
                    routes.append(r)
            comms = tuple(Commodity(r[0], r[-1], r) for r in routes)
        else:
            p_eff = p if p is not None else n - 1
            pairs = [(s, t) for s, t in random_pairs(rng, d, k * 3)]
            if variant is Variant.RSPP_PL:
                pairs = [(s, t) for s, t in pairs if next(base_paths(d, s, t, p_eff), None) is not None]
            comms = tuple(Commodity(s, t) for s, t in sorted(rng.sample(pairs, min(k, len(pairs)))))
        if len(comms) == k or attempt == 99:
            return Instance(variant, d, comms, target, (p if p is not None else n - 1) if variant is Variant.RSPP_PL else None)
    raise AssertionError("unreachable")


def random_low_treewidth_digraph(rng: random.Random, n: int, max_degree: int = 3, width: int = 2, extra: int = 3, both_ways: float = 0.2) -> Digraph:
    """Orientation of a random tree plus a few chords, keeping degree and treewidth bounded."""
    while True:
        und = nx.random_labeled_tree(n, seed=rng.randrange(2**31)) if n > 1 else nx.empty_graph(n)
        for _ in range(rng.randint(0, extra)):
            if n < 2:
                break
            a, b = rng.sample(range(n), 2)
            if not und.has_edge(a, b) and und.degree(a) < max_degree and und.degree(b) < max_degree:
                und.add_edge(a, b)
        if n and max(dict(und.degree).values()) > max_degree:
            continue
        if exact_elimination_order(und)[0] > width:
            continue
        edges = set()
        for a, b in und.edges:
            edges.add((a, b) if rng.random() < 0.5 else (b, a))
            if rng.random() < both_ways:
                edges.add((b, a))
        return Digraph.from_edges(n, edges)


def random_bounded_instance(
    rng: random.Random, variant: Variant, n: int, k: int, target: int, p: int, hubs: int = 2
) -> Instance:
    """Low treewidth, low degree, commodities no longer than p, concentrated on a few sources."""
    variant = Variant(variant)
    d = random_low_treewidth_digraph(rng, n)
    starts = rng.sample(range(n), min(hubs, n))
    comms: list[Commodity] = []
    for _ in range(k * 4):
        if len(comms) == k:
            break
        r = random_walk_route(rng, d, rng.choice(starts), rng.randint(1, p))
        if len(r) < 2:
            continue
        c = Commodity(r[0], r[-1], r if variant is Variant.SPP else None)
        if c not in comms:
            comms.append(c)
    return Instance(variant, d, tuple(comms), target, p if variant is Variant.RSPP_PL else None)


def random_valid_cover(rng: random.Random, n: int, k: int, variant: Variant = Variant.SPP) -> tuple[Instance, PathCover]:
    """A random instance with a random legal witness per commodity, target set to what the union needs."""
    variant = Variant(variant)
    while True:
        inst = random_instance(rng, variant, n, k, 0, density=0.45, max_route=n - 1)
        if inst.k != k:
            continue
        ws = []
        for c in inst.commodities:
            if variant is Variant.SPP:
                inner = [v for v in c.route[1:-1] if rng.random() < 0.6]
                ws.append((c.source, *inner, c.destination))
            else:
                walk = random_walk_to(rng, inst.graph, c.source, c.destination)
                ws.append(walk)
        cover = PathCover(tuple(ws))
        deg = [0] * n
        for u, _ in cover.edges():
            deg[u] += 1
        return inst.with_target(max(deg)), cover


def random_walk_to(rng: random.Random, d: Digraph, s: int, t: int) -> tuple[int, ...]:
    """A random simple s-t path whose steps are closure edges."""
    path = [s]
    while path[-1] != t:
        here = path[-1]
        options = [v for v in range(d.n) if v not in path and d.reaches(here, v) and (v == t or d.reaches(v, t))]
        if t in options and (len(options) == 1 or rng.random() < 0.4):
            path.append(t)
        else:
            path.append(rng.choice([v for v in options if v != t]))
    return tuple(path)


def random_smd(rng: random.Random, n: int, k: int, target: int | None = None, flex_rate: float = 0.3) -> SmdInstance:
    inst = random_instance(rng, Variant.SPP, n, k, 0, density=0.35, max_route=5)
    flexible = frozenset(v for v in range(n) if rng.random() < flex_rate)
    return SmdInstance(inst.graph, flexible, inst.commodities, rng.randint(0, 2) if target is None else target)


# --- exhaustive enumeration ------------------------------------------------


@lru_cache(maxsize=None)
def digraph_classes(n: int) -> tuple[Digraph, ...]:
    """One representative per isomorphism class of loopless digraphs on n vertices."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    slot = {e: i for i, e in enumerate(pairs)}
    perms = list(itertools.permutations(range(n)))
    maps = [[slot[(p[a], p[b])] for a, b in pairs] for p in perms]
    seen: set[int] = set()
    reps = []
    for mask in range(1 << len(pairs)):
        if mask in seen:
            continue
        images = set()
        for mp in maps:
            img = 0
            for i, j in enumerate(mp):
                if mask >> i & 1:
                    img |= 1 << j
            images.add(img)
        seen |= images
        reps.append(Digraph.from_edges(n, [e for i, e in enumerate(pairs) if mask >> i & 1]))
    return tuple(reps)


def commodity_sets(n: int, k_max: int, k_min: int = 0) -> Iterator[tuple[tuple[int, int], ...]]:
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    for k in range(k_min, k_max + 1):
        yield from itertools.combinations(pairs, k)


def route_structures(n: int, k_max: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Route tuples on at most n vertices, up to relabelling of the first route.

    The first route is always 0, 1, ..., L-1; later routes range over every
    simple sequence.  Edges outside the routes never matter for routed
    instances, so this covers every routed instance of that size.
    """
    routes = [r for size in range(2, n + 1) for r in itertools.permutations(range(n), size)]
    if k_max >= 1:
        for size in range(2, n + 1):
            first = tuple(range(size))
            yield (first,)
            if k_max >= 2:
                for r in routes:
                    if r != first:
                        yield (first, r)


def routed_instance(n: int, routes: Sequence[Sequence[int]], target: int) -> Instance:
    edges = {e for r in routes for e in zip(r, r[1:])}
    d = Digraph.from_edges(n, edges)
    return Instance(Variant.SPP, d, tuple(Commodity(r[0], r[-1], tuple(r)) for r in routes), target)
