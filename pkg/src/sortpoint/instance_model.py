"""Instances, commodities, path covers and the solution validator."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import ValidationError
from .graph_core import Digraph, Edge, members


class Variant(str, Enum):
    SPP = "SPP"  # each commodity carries a fixed route
    RSPP = "RSPP"  # free routing inside the closure
    RSPP_PL = "RSPP_PL"  # free routing, but along a short base path of D

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Commodity:
    source: int
    destination: int
    route: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.source == self.destination:
            raise ValidationError(f"commodity with source == destination ({self.source})")
        if self.route is not None:
            route = tuple(self.route)
            object.__setattr__(self, "route", route)
            if len(route) < 2 or route[0] != self.source or route[-1] != self.destination:
                raise ValidationError("route must run from source to destination")
            if len(set(route)) != len(route):
                raise ValidationError("route repeats a vertex")

    @property
    def pair(self) -> Edge:
        return (self.source, self.destination)


def route_pairs(route: Sequence[int]) -> frozenset[Edge]:
    """Closure of a path: every forward pair ``(route[i], route[j])``, i < j."""
    return frozenset((route[i], route[j]) for i in range(len(route)) for j in range(i + 1, len(route)))


@dataclass(frozen=True)
class Instance:
    variant: Variant
    graph: Digraph
    commodities: tuple[Commodity, ...]
    target: int
    path_length: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "commodities", tuple(self.commodities))
        if self.target < 0:
            raise ValidationError("target must be non-negative")
        n = self.graph.n
        for i, c in enumerate(self.commodities):
            if not (0 <= c.source < n and 0 <= c.destination < n):
                raise ValidationError(f"commodity {i} names a vertex outside the graph")
            if self.variant is Variant.SPP:
                if c.route is None:
                    raise ValidationError(f"SPP commodity {i} has no route")
                for u, v in zip(c.route, c.route[1:]):
                    if not self.graph.has_edge(u, v):
                        raise ValidationError(f"route of commodity {i} uses a non-edge ({u},{v})")
            elif c.route is not None:
                raise ValidationError(f"{self.variant} commodity {i} must not carry a route")
        if self.variant is Variant.RSPP_PL:
            if self.path_length is None or self.path_length < 1:
                raise ValidationError("RSPP_PL needs a positive path_length")
        elif self.path_length is not None:
            raise ValidationError("path_length is only meaningful for RSPP_PL")

    @property
    def k(self) -> int:
        return len(self.commodities)

    @property
    def effective_path_length(self) -> int | None:
        """``p`` as used by the path-length algorithms; for SPP the longest route."""
        if self.variant is Variant.RSPP_PL:
            return self.path_length
        if self.variant is Variant.SPP:
            return max((len(c.route) - 1 for c in self.commodities), default=1)
        return None

    def with_target(self, target: int) -> "Instance":
        return Instance(self.variant, self.graph, self.commodities, target, self.path_length)

    @cached_property
    def sources(self) -> frozenset[int]:
        return frozenset(c.source for c in self.commodities)

    @cached_property
    def terminals(self) -> frozenset[int]:
        return self.sources | frozenset(c.destination for c in self.commodities)

    @cached_property
    def route_closures(self) -> tuple[frozenset[Edge], ...]:
        if self.variant is not Variant.SPP:
            raise ValidationError("only SPP commodities carry routes")
        return tuple(route_pairs(c.route) for c in self.commodities)


@dataclass(frozen=True)
class PathCover:
    witnesses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "witnesses", tuple(tuple(w) for w in self.witnesses))

    def edges(self) -> frozenset[Edge]:
        return frozenset(e for w in self.witnesses for e in zip(w, w[1:]))

    def vertices(self) -> frozenset[int]:
        return frozenset(v for w in self.witnesses for v in w)

    def union_graph(self, base: Digraph) -> Digraph:
        return base.with_edges(self.edges())


@dataclass(frozen=True)
class SolveOutcome:
    """Decision plus, on YES, a solution graph; ``detail`` records which path a solver took."""

    decision: bool
    graph: Digraph | None
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ValidationReport:
    is_subgraph_of_closure: bool
    max_outdegree: int
    offending_vertices: tuple[int, ...]
    unsatisfied_commodities: tuple[int, ...]
    valid: bool
    foreign_edges: tuple[Edge, ...] = field(default=())


# --- base paths -----------------------------------------------------------


def base_paths(d: Digraph, s: int, t: int, p: int) -> Iterator[tuple[int, ...]]:
    """Simple directed s-t paths in ``d`` with at most ``p`` edges.

    Branches that cannot reach ``t`` within the remaining budget are cut using
    directed BFS distances to ``t``.
    """
    dist = _dist_to(d, t)
    if dist[s] is None or dist[s] > p:
        return
    path = [s]
    on_path = 1 << s

    def extend(v: int, budget: int):
        nonlocal on_path
        if v == t:
            yield tuple(path)
            return
        for w in d.succ[v]:
            dw = dist[w]
            if dw is None or dw > budget - 1 or on_path >> w & 1:
                continue
            path.append(w)
            on_path |= 1 << w
            yield from extend(w, budget - 1)
            on_path &= ~(1 << w)
            path.pop()

    yield from extend(s, p)


def _dist_to(d: Digraph, t: int) -> list[int | None]:
    dist: list[int | None] = [None] * d.n
    dist[t] = 0
    frontier = [t]
    step = 0
    while frontier:
        step += 1
        nxt = []
        for v in frontier:
            for u in d.pred[v]:
                if dist[u] is None:
                    dist[u] = step
                    nxt.append(u)
        frontier = nxt
    return dist


def has_path_within(edges_out: Sequence[int], order: Sequence[int]) -> bool:
    """Is there an ``order[0]``-``order[-1]`` path using only forward pairs of ``order``?

    ``edges_out[v]`` is the out-neighbour bitmask of ``v`` in the candidate graph.
    """
    reached = 1 << order[0]
    for i, v in enumerate(order):
        if not reached >> v & 1:
            continue
        later = 0
        for w in order[i + 1 :]:
            later |= 1 << w
        reached |= edges_out[v] & later
    return bool(reached >> order[-1] & 1)


def _out_bits(h: Digraph | Iterable[Edge], n: int) -> list[int]:
    out = [0] * n
    edges = h.edges if isinstance(h, Digraph) else h
    for u, v in edges:
        out[u] |= 1 << v
    return out


def commodity_satisfied(instance: Instance, index: int, out_bits: Sequence[int]) -> bool:
    c = instance.commodities[index]
    if instance.variant is Variant.SPP:
        return has_path_within(out_bits, c.route)
    if instance.variant is Variant.RSPP:
        seen = 1 << c.source
        frontier = seen
        while frontier:
            nxt = 0
            for v in members(frontier):
                nxt |= out_bits[v]
            frontier = nxt & ~seen
            seen |= frontier
        return bool(seen >> c.destination & 1)
    return any(
        has_path_within(out_bits, bp)
        for bp in base_paths(instance.graph, c.source, c.destination, instance.path_length)
    )


def validate_solution(instance: Instance, h: Digraph | Iterable[Edge]) -> ValidationReport:
    d = instance.graph
    edges = frozenset(h.edges if isinstance(h, Digraph) else h)
    foreign = tuple(sorted(e for e in edges if not (0 <= e[0] < d.n and 0 <= e[1] < d.n) or not d.reaches(*e)))
    in_closure = not foreign
    counts = Counter(u for u, _ in edges)
    max_out = max(counts.values(), default=0)
    offending = tuple(sorted(v for v, c in counts.items() if c > instance.target))
    if in_closure:
        out = _out_bits(edges, d.n)
        unsatisfied = tuple(i for i in range(instance.k) if not commodity_satisfied(instance, i, out))
    else:
        unsatisfied = tuple(range(instance.k))
    valid = in_closure and max_out <= instance.target and not unsatisfied
    return ValidationReport(in_closure, max_out, offending, unsatisfied, valid, foreign)


def trivial_yes_check(instance: Instance) -> Digraph | None:
    """Solution graph for the two easy regimes, or None.

    If T is at least the maximum outdegree of D, D itself works.  If T is at
    least the largest number of commodities sharing a source, the direct
    (s, t) edges work, provided each of them lies in the closure.
    """
    d = instance.graph
    # a candidate can only fail if some commodity is unroutable at every T
    if instance.target >= d.max_out_degree():
        return d if validate_solution(instance, d).valid else None
    per_source = Counter(c.source for c in instance.commodities)
    if instance.target >= max(per_source.values(), default=0):
        direct = d.with_edges({c.pair for c in instance.commodities})
        if validate_solution(instance, direct).valid:
            return direct
    return None


def witness_is_legal(instance: Instance, index: int, witness: Sequence[int]) -> bool:
    """Does ``witness`` serve commodity ``index`` on its own, per the variant's rules?"""
    c = instance.commodities[index]
    if len(witness) < 2 or witness[0] != c.source or witness[-1] != c.destination:
        return False
    if len(set(witness)) != len(witness):
        return False
    pairs = list(zip(witness, witness[1:]))
    d = instance.graph
    if instance.variant is Variant.SPP:
        pos = {v: i for i, v in enumerate(c.route)}
        return all(u in pos and v in pos and pos[u] < pos[v] for u, v in pairs)
    if instance.variant is Variant.RSPP:
        return all(d.reaches(u, v) for u, v in pairs)
    for bp in base_paths(d, c.source, c.destination, instance.path_length):
        pos = {v: i for i, v in enumerate(bp)}
        if all(u in pos and v in pos and pos[u] < pos[v] for u, v in pairs):
            return True
    return False


def validate_cover(instance: Instance, cover: PathCover) -> bool:
    if len(cover.witnesses) != instance.k:
        return False
    if not all(witness_is_legal(instance, i, w) for i, w in enumerate(cover.witnesses)):
        return False
    return validate_solution(instance, cover.edges()).valid
