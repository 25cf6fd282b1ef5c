"""Simple digraphs over dense integer vertices, with bitset reachability.

Vertices are ``0..n-1``; string labels only matter at the I/O boundary.
A vertex set is often passed around as an ``int`` bitmask (bit ``v`` set
means ``v`` is a member), which keeps closure queries O(1).
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CycleDetected, InvalidPrefix, ValidationError

Edge = tuple[int, int]


def bits_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class Digraph:
    vertex_count: int
    edges: frozenset[Edge]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        n = self.vertex_count
        if n < 0:
            raise ValidationError("vertex_count must be non-negative")
        if not isinstance(self.edges, frozenset):
            object.__setattr__(self, "edges", frozenset(self.edges))
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u},{v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        elif len(self.labels) != n:
            raise ValidationError("one label per vertex is required")
        elif len(set(self.labels)) != n:
            raise ValidationError("vertex labels must be unique")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge], labels: Sequence[str] = ()) -> "Digraph":
        return cls(n, frozenset((int(u), int(v)) for u, v in edges), tuple(labels))

    @property
    def n(self) -> int:
        return self.vertex_count

    @cached_property
    def succ(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            out[u].append(v)
        return tuple(tuple(sorted(row)) for row in out)

    @cached_property
    def pred(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            out[v].append(u)
        return tuple(tuple(sorted(row)) for row in out)

    @cached_property
    def succ_bits(self) -> tuple[int, ...]:
        return tuple(bits_of(row) for row in self.succ)

    @cached_property
    def reach_bits(self) -> tuple[int, ...]:
        """``reach_bits[u]`` has bit ``v`` iff a path of length >= 1 leads from u to v."""
        reach = []
        for s in range(self.vertex_count):
            seen = 0
            frontier = self.succ_bits[s]
            while frontier:
                seen |= frontier
                nxt = 0
                for w in members(frontier):
                    nxt |= self.succ_bits[w]
                frontier = nxt & ~seen
            reach.append(seen)
        return tuple(reach)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def reaches(self, u: int, v: int) -> bool:
        return bool(self.reach_bits[u] >> v & 1)

    def out_degree(self, v: int) -> int:
        return len(self.succ[v])

    def max_out_degree(self) -> int:
        return max((len(row) for row in self.succ), default=0)

    def with_edges(self, edges: Iterable[Edge]) -> "Digraph":
        """Same vertices and labels, different edge set."""
        return Digraph(self.vertex_count, frozenset(edges), self.labels)

    def induced(self, vertices: Iterable[int]) -> "Digraph":
        """Subgraph on ``vertices``, keeping the original indices."""
        keep = bits_of(vertices)
        return self.with_edges((u, v) for u, v in self.edges if keep >> u & 1 and keep >> v & 1)

    def undirected_adjacency(self) -> tuple[int, ...]:
        adj = [0] * self.vertex_count
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    def label(self, v: int) -> str:
        return self.labels[v]


def transitive_closure(d: Digraph) -> Digraph:
    # reach_bits never records u->u, so cycles produce no self-loops
    edges = [(u, v) for u in range(d.n) for v in members(d.reach_bits[u]) if v != u]
    return d.with_edges(edges)


@dataclass(frozen=True)
class SccPartition:
    component_of: tuple[int, ...]
    components: tuple[frozenset[int], ...]


def strongly_connected_components(d: Digraph) -> SccPartition:
    """Components in a topological order of the condensation.

    Ties between independent components go to the one holding the smaller
    vertex index.
    """
    n = d.n
    reach = d.reach_bits
    comp_of = [-1] * n
    groups: list[list[int]] = []
    for v in range(n):
        if comp_of[v] >= 0:
            continue
        mates = [v] + [u for u in members(reach[v]) if u != v and reach[u] >> v & 1]
        for u in mates:
            comp_of[u] = len(groups)
        groups.append(sorted(mates))

    # Kahn over the condensation with smallest-representative tie break
    c = len(groups)
    out: list[set[int]] = [set() for _ in range(c)]
    indeg = [0] * c
    for u, v in d.edges:
        a, b = comp_of[u], comp_of[v]
        if a != b and b not in out[a]:
            out[a].add(b)
            indeg[b] += 1
    heap = [(groups[i][0], i) for i in range(c) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, i = heapq.heappop(heap)
        order.append(i)
        for j in out[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (groups[j][0], j))
    renumber = {old: new for new, old in enumerate(order)}
    return SccPartition(
        component_of=tuple(renumber[comp_of[v]] for v in range(n)),
        components=tuple(frozenset(groups[i]) for i in order),
    )


def topological_order(d: Digraph, prefix: Sequence[int] = (), vertices: Iterable[int] | None = None) -> list[int]:
    """Topological order of ``d`` (or of ``d`` induced on ``vertices``) that starts with ``prefix``.

    Ties are broken by smallest vertex index.
    """
    pool = set(range(d.n)) if vertices is None else set(vertices)
    indeg = {v: 0 for v in pool}
    for u, v in d.edges:
        if u in pool and v in pool:
            indeg[v] += 1

    order: list[int] = []
    placed: set[int] = set()
    if len(set(prefix)) != len(prefix) or not set(prefix) <= pool:
        raise InvalidPrefix("prefix must list distinct vertices of the graph")
    for v in prefix:
        if indeg[v] != 0:
            topological_order(d, (), pool)  # raises CycleDetected first if cyclic
            raise InvalidPrefix(f"vertex {v} has an unplaced predecessor")
        order.append(v)
        placed.add(v)
        for w in d.succ[v]:
            if w in pool:
                indeg[w] -= 1

    heap = [v for v in pool if v not in placed and indeg[v] == 0]
    heapq.heapify(heap)
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in d.succ[v]:
            if w in pool:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, w)
    if len(order) != len(pool):
        raise CycleDetected("graph has a directed cycle")
    return order


def undirected_ball(d: Digraph, sources: Iterable[int], p: int) -> frozenset[int]:
    """Vertices within undirected distance ``p`` of some vertex of ``sources``."""
    adj = d.undirected_adjacency()
    seen = bits_of(sources)
    frontier = seen
    for _ in range(p):
        nxt = 0
        for v in members(frontier):
            nxt |= adj[v]
        frontier = nxt & ~seen
        if not frontier:
            break
        seen |= frontier
    return frozenset(members(seen))


def undirected_distances(d: Digraph, source: int) -> list[int | None]:
    adj = d.undirected_adjacency()
    dist: list[int | None] = [None] * d.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in members(adj[v]):
            if dist[w] is None:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist
