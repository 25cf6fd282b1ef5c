"""Nice tree decompositions of the underlying undirected graph.

Small graphs get an optimal elimination order from a subset dynamic
program; larger ones use networkx's min-fill heuristic.  Either way the
result is rebuilt as a nice decomposition with empty leaf and root bags,
children always stored before their parent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from .errors import ExactCapExceeded
from .graph_core import Digraph

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass(frozen=True)
class NiceNode:
    kind: str
    bag: frozenset[int]
    children: tuple[int, ...] = ()
    vertex: int | None = None


@dataclass(frozen=True)
class NiceTreeDecomposition:
    nodes: tuple[NiceNode, ...]
    root: int

    @property
    def width(self) -> int:
        return max((len(x.bag) for x in self.nodes), default=0) - 1

    def cones(self) -> list[frozenset[int]]:
        """Per node, every vertex appearing in a bag at or below it."""
        out: list[frozenset[int]] = []
        for node in self.nodes:
            acc = set(node.bag)
            for c in node.children:
                acc |= out[c]
            out.append(frozenset(acc))
        return out


def _as_graph(g) -> nx.Graph:
    if isinstance(g, Digraph):
        h = nx.Graph()
        h.add_nodes_from(range(g.n))
        h.add_edges_from(g.edges)
        return h
    return g


def _adjacency(g: nx.Graph, order: Sequence[int]) -> list[int]:
    index = {v: i for i, v in enumerate(order)}
    adj = [0] * len(order)
    for u, v in g.edges:
        if u != v:
            adj[index[u]] |= 1 << index[v]
            adj[index[v]] |= 1 << index[u]
    return adj


def _q_size(adj: list[int], inside: int, v: int) -> int:
    """Vertices outside ``inside`` and v reachable from v through ``inside``."""
    seen = 1 << v
    frontier = 1 << v
    found = 0
    while frontier:
        nxt = 0
        x = frontier
        while x:
            low = x & -x
            u = low.bit_length() - 1
            x ^= low
            nxt |= adj[u]
        nxt &= ~seen
        seen |= nxt
        found |= nxt & ~inside
        frontier = nxt & inside
    return bin(found).count("1")


def exact_elimination_order(g: nx.Graph, cap: int = 14) -> tuple[int, list]:
    """Optimal width and an elimination order achieving it, via the subset recurrence."""
    verts = sorted(g.nodes)
    n = len(verts)
    if n > cap:
        raise ExactCapExceeded(f"exact treewidth limited to {cap} vertices, got {n}")
    if n == 0:
        return -1, []
    adj = _adjacency(g, verts)
    best = [0] * (1 << n)
    choice = [0] * (1 << n)
    best[0] = -1
    for s in range(1, 1 << n):
        top = None
        x = s
        while x:
            low = x & -x
            v = low.bit_length() - 1
            x ^= low
            rest = s ^ low
            val = max(best[rest], _q_size(adj, rest, v))
            if top is None or val < top:
                top, pick = val, v
        best[s] = top
        choice[s] = pick
    order = []
    s = (1 << n) - 1
    while s:
        v = choice[s]
        order.append(verts[v])
        s ^= 1 << v
    order.reverse()
    return best[(1 << n) - 1], order


def elimination_width(g: nx.Graph, order: Sequence) -> int:
    """Width of the decomposition induced by eliminating ``order`` left to right."""
    h = nx.Graph(g)
    width = -1
    for v in order:
        nb = set(h.neighbors(v))
        width = max(width, len(nb))
        h.add_edges_from((a, b) for a in nb for b in nb if a != b)
        h.remove_node(v)
    return width


def _bags_from_order(g: nx.Graph, order: Sequence) -> tuple[list[frozenset], list[tuple[int, int]]]:
    h = nx.Graph(g)
    pos = {v: i for i, v in enumerate(order)}
    bags, higher = [], []
    for v in order:
        nb = set(h.neighbors(v))
        bags.append(frozenset(nb | {v}))
        higher.append(nb)
        h.add_edges_from((a, b) for a in nb for b in nb if a != b)
        h.remove_node(v)
    edges = []
    for i, nb in enumerate(higher):
        if nb:
            edges.append((i, pos[min(nb, key=pos.__getitem__)]))
    return bags, edges


def _tree_from_bags(bags: list[frozenset], edges: Iterable[tuple[int, int]]) -> tuple[list[frozenset], dict[int, list[int]], int]:
    t = nx.Graph()
    t.add_nodes_from(range(len(bags)))
    t.add_edges_from(edges)
    comps = sorted((sorted(c) for c in nx.connected_components(t)), key=lambda c: c[0])
    root = comps[0][0]
    # hang other components under the root; they share no vertex so nothing breaks
    for c in comps[1:]:
        t.add_edge(root, c[0])
    children: dict[int, list[int]] = {i: [] for i in range(len(bags))}
    for parent, child in nx.bfs_edges(t, root, sort_neighbors=sorted):
        children[parent].append(child)
    return bags, children, root


class _Builder:
    def __init__(self):
        self.nodes: list[NiceNode] = []

    def add(self, kind, bag, children=(), vertex=None) -> int:
        self.nodes.append(NiceNode(kind, frozenset(bag), tuple(children), vertex))
        return len(self.nodes) - 1

    def morph(self, idx: int, target: frozenset) -> int:
        bag = set(self.nodes[idx].bag)
        for v in sorted(bag - target):
            bag.discard(v)
            idx = self.add(FORGET, bag, (idx,), v)
        for v in sorted(target - bag):
            bag.add(v)
            idx = self.add(INTRODUCE, bag, (idx,), v)
        return idx


def nice_from_bags(bags: list[frozenset], tree_edges: Iterable[tuple[int, int]]) -> NiceTreeDecomposition:
    b = _Builder()
    if not bags:
        root = b.add(LEAF, ())
        return NiceTreeDecomposition(tuple(b.nodes), root)
    bags, children, root = _tree_from_bags(bags, tree_edges)

    def build(i: int) -> int:
        if not children[i]:
            return b.morph(b.add(LEAF, ()), bags[i])
        subs = [b.morph(build(c), bags[i]) for c in children[i]]
        acc = subs[0]
        for s in subs[1:]:
            acc = b.add(JOIN, bags[i], (acc, s))
        return acc

    # iterative depth guard is unnecessary at the sizes this is used for
    top = b.morph(build(root), frozenset())
    return NiceTreeDecomposition(tuple(b.nodes), top)


def build_nice_tree_decomposition(g, mode: str = "auto", exact_cap: int = 14) -> NiceTreeDecomposition:
    """``exact`` (optimal, capped), ``min_fill`` (heuristic), or ``auto`` (exact when small)."""
    g = _as_graph(g)
    if mode == "auto":
        mode = "exact" if g.number_of_nodes() <= exact_cap else "min_fill"
    if mode == "exact":
        _, order = exact_elimination_order(g, exact_cap)
        bags, edges = _bags_from_order(g, order)
    elif mode == "min_fill":
        if g.number_of_nodes() == 0:
            bags, edges = [], []
        else:
            _, tree = treewidth_min_fill_in(g)
            bags = sorted(tree.nodes, key=lambda x: sorted(x))
            index = {x: i for i, x in enumerate(bags)}
            edges = [(index[a], index[c]) for a, c in tree.edges]
            covered = set().union(*bags)
            # isolated vertices may be missing from the heuristic's bags
            for v in sorted(set(g.nodes) - covered):
                bags.append(frozenset({v}))
    else:
        raise ValueError(f"unknown decomposition mode {mode!r}")
    return nice_from_bags(list(bags), edges)


def check_nice(td: NiceTreeDecomposition, g) -> list[str]:
    """Violated decomposition properties (empty when valid)."""
    g = _as_graph(g)
    problems = []
    nodes = td.nodes
    root = nodes[td.root]
    if root.bag:
        problems.append("root bag not empty")
    parent = {}
    for i, x in enumerate(nodes):
        for c in x.children:
            if c >= i:
                problems.append(f"child {c} stored after parent {i}")
            parent[c] = i
        kids = [nodes[c] for c in x.children]
        if x.kind == LEAF and (x.children or x.bag):
            problems.append(f"leaf {i} not empty")
        elif x.kind == INTRODUCE and not (len(kids) == 1 and x.vertex not in kids[0].bag and x.bag == kids[0].bag | {x.vertex}):
            problems.append(f"bad introduce {i}")
        elif x.kind == FORGET and not (len(kids) == 1 and x.vertex in kids[0].bag and x.bag == kids[0].bag - {x.vertex}):
            problems.append(f"bad forget {i}")
        elif x.kind == JOIN and not (len(kids) == 2 and all(k.bag == x.bag for k in kids)):
            problems.append(f"bad join {i}")
    if len(parent) != len(nodes) - 1:
        problems.append("not a single rooted tree")
    for u, v in g.edges:
        if not any(u in x.bag and v in x.bag for x in nodes):
            problems.append(f"edge {u}-{v} in no bag")
    for v in g.nodes:
        holders = {i for i, x in enumerate(nodes) if v in x.bag}
        if not holders:
            problems.append(f"vertex {v} in no bag")
            continue
        tops = [i for i in holders if parent.get(i) not in holders]
        if len(tops) != 1:
            problems.append(f"bags holding {v} are not connected")
    return problems
