"""Brute-force ground truth.

Two structurally different exhaustive searches live here:

* ``solve_exact`` searches the product of per-commodity witness paths
  (a solution path cover is exactly one legal witness per commodity);
* ``solve_by_subgraphs`` searches edge subsets of the closure directly and
  never looks at witness paths.

The second exists to certify the first.  ``compact_path_cover`` shrinks a
cover until non-source vertices carry pairwise distinct membership sets.
"""

from __future__ import annotations

import itertools
import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import BudgetExceeded, InvalidCover
from .graph_core import Digraph, Edge, members
from .instance_model import (
    Commodity,
    Instance,
    PathCover,
    Variant,
    base_paths,
    commodity_satisfied,
    validate_cover,
)


def _default_budget(fallback: int) -> int:
    raw = os.environ.get("SORTPOINT_BUDGET")
    return int(raw) if raw else fallback


@dataclass(frozen=True)
class OracleConfig:
    max_witnesses_per_commodity: int = 200_000
    max_product: int = 5_000_000

    def __post_init__(self):
        if self.max_witnesses_per_commodity <= 0 or self.max_product <= 0:
            raise ValueError("oracle budgets must be positive")

    @classmethod
    def from_env(cls) -> "OracleConfig":
        b = _default_budget(5_000_000)
        return cls(max_witnesses_per_commodity=max(1, b // 25), max_product=b)


# --- witness enumeration --------------------------------------------------


def _subsequences(route: Sequence[int]) -> Iterator[tuple[int, ...]]:
    inner = route[1:-1]
    for size in range(len(inner) + 1):
        for pick in itertools.combinations(inner, size):
            yield (route[0], *pick, route[-1])


def _closure_paths(d: Digraph, s: int, t: int) -> Iterator[tuple[int, ...]]:
    """All simple s-t paths whose steps are closure edges."""
    if not d.reaches(s, t):
        return
    # a vertex is only useful if it sits between s and t
    between = [v for v in range(d.n) if v not in (s, t) and d.reaches(s, v) and d.reaches(v, t)]
    for size in range(len(between) + 1):
        for pick in itertools.permutations(between, size):
            walk = (s, *pick, t)
            if all(d.reaches(a, b) for a, b in zip(walk, walk[1:])):
                yield walk


def witnesses(instance: Instance, index: int, cap: int | None = None) -> list[tuple[int, ...]]:
    """Legal witnesses for one commodity, shortest first, ties lexicographic."""
    c: Commodity = instance.commodities[index]
    d = instance.graph
    if instance.variant is Variant.SPP:
        found = set(_subsequences(c.route))
    elif instance.variant is Variant.RSPP:
        found = set()
        for w in _closure_paths(d, c.source, c.destination):
            found.add(w)
            if cap is not None and len(found) > cap:
                raise BudgetExceeded(f"commodity {index}: more than {cap} witnesses")
    else:
        found = set()
        for bp in base_paths(d, c.source, c.destination, instance.path_length):
            found.update(_subsequences(bp))
            if cap is not None and len(found) > cap:
                raise BudgetExceeded(f"commodity {index}: more than {cap} witnesses")
    if cap is not None and len(found) > cap:
        raise BudgetExceeded(f"commodity {index}: more than {cap} witnesses")
    return sorted(found, key=lambda w: (len(w), w))


# --- path-cover product ---------------------------------------------------


def solve_exact(instance: Instance, cfg: OracleConfig | None = None) -> PathCover | None:
    """First cover (in the product order) whose union respects the target.

    Two exact shortcuts keep this tractable without changing the answer:
    a partial union that already breaks the target ends its branch (unions
    only grow), and a commodity already served inside the current partial
    union takes that witness (any other choice only adds edges).
    """
    cfg = cfg or OracleConfig()
    k = instance.k
    if k == 0:
        return PathCover(())
    lists = [witnesses(instance, i, cfg.max_witnesses_per_commodity) for i in range(k)]
    if any(not w for w in lists):
        return None
    T = instance.target
    n = instance.graph.n
    out = [0] * n
    deg = [0] * n
    chosen: list[tuple[int, ...]] = [()] * k
    work = 0

    def served_inside(i: int) -> tuple[int, ...] | None:
        for w in lists[i]:
            if all(out[a] >> b & 1 for a, b in zip(w, w[1:])):
                return w
        return None

    def place(i: int) -> bool:
        nonlocal work
        if i == k:
            return True
        inside = served_inside(i)
        if inside is not None:
            chosen[i] = inside
            return place(i + 1)
        for w in lists[i]:
            work += 1
            if work > cfg.max_product:
                raise BudgetExceeded(f"oracle explored more than {cfg.max_product} partial covers")
            added = [(a, b) for a, b in zip(w, w[1:]) if not out[a] >> b & 1]
            if any(deg[a] + cnt > T for a, cnt in Counter(a for a, _ in added).items()):
                continue
            for a, b in added:
                out[a] |= 1 << b
                deg[a] += 1
            chosen[i] = w
            if place(i + 1):
                return True
            for a, b in added:
                out[a] &= ~(1 << b)
                deg[a] -= 1
        return False

    if place(0):
        return PathCover(tuple(chosen))
    return None


def candidate_edges(instance: Instance) -> list[list[int]]:
    """Per vertex, the closure out-neighbours any solution could use.

    SPP restricts to forward pairs of routes and RSPP_PL to forward pairs of
    short base paths; RSPP keeps every closure edge.
    """
    d = instance.graph
    n = d.n
    if instance.variant is Variant.RSPP:
        return [members(d.reach_bits[u] & ~(1 << u)) for u in range(n)]
    pool: set[Edge] = set()
    for c in instance.commodities:
        paths = [c.route] if instance.variant is Variant.SPP else base_paths(d, c.source, c.destination, instance.path_length)
        for bp in paths:
            pool.update((bp[i], bp[j]) for i in range(len(bp)) for j in range(i + 1, len(bp)))
    rows: list[list[int]] = [[] for _ in range(n)]
    for u, v in sorted(pool):
        rows[u].append(v)
    return rows


def solve_by_subgraphs(instance: Instance, max_graphs: int = 5_000_000, flexible: frozenset[int] = frozenset()) -> Digraph | None:
    """Search subgraphs of the closure directly.

    Adding an edge never unserves a commodity, so each vertex outside
    ``flexible`` only needs its maximal choices: all candidates when it has at
    most T of them, otherwise every T-subset.  Flexible vertices keep all
    their candidates.
    """
    d = instance.graph
    T = instance.target
    rows = candidate_edges(instance)
    options = []
    for u in range(d.n):
        row = rows[u]
        if u in flexible or len(row) <= T:
            options.append([tuple(row)])
        else:
            options.append(list(itertools.combinations(row, T)))
    total = 1
    for o in options:
        total *= len(o)
    if total > max_graphs:
        raise BudgetExceeded(f"subgraph search would visit {total} graphs")
    for pick in itertools.product(*options):
        out = [0] * d.n
        for u, targets in enumerate(pick):
            for v in targets:
                out[u] |= 1 << v
        if all(commodity_satisfied(instance, i, out) for i in range(instance.k)):
            return d.with_edges((u, v) for u, targets in enumerate(pick) for v in targets)
    return None


def observation_bound(instance: Instance) -> int:
    per_source = Counter(c.source for c in instance.commodities)
    return min(instance.graph.max_out_degree(), max(per_source.values(), default=0))


def min_target_exact(d: Digraph, commodities: Sequence[Commodity], variant, p: int | None = None, cfg: OracleConfig | None = None) -> int | None:
    """Smallest feasible target, or None when some commodity cannot be routed at all."""
    inst = Instance(Variant(variant), d, tuple(commodities), 0, p)
    for t in range(observation_bound(inst) + 1):
        if solve_exact(inst.with_target(t), cfg) is not None:
            return t
    # the bound is feasible whenever every commodity is routable
    return None


# --- compaction -----------------------------------------------------------


def _membership(cover: PathCover, sources: frozenset[int]) -> dict[int, frozenset[int]]:
    q: dict[int, set[int]] = {}
    for i, w in enumerate(cover.witnesses):
        for v in w:
            if v not in sources:
                q.setdefault(v, set()).add(i)
    return {v: frozenset(s) for v, s in q.items()}


def _cut(path: tuple[int, ...], a: int, b: int) -> tuple[int, ...]:
    """Drop the stretch from ``a`` (inclusive) up to ``b`` (exclusive)."""
    i, j = path.index(a), path.index(b)
    return path[:i] + path[j:]


def compact_path_cover_counted(instance: Instance, cover: PathCover) -> tuple[PathCover, int]:
    if not validate_cover(instance, cover):
        raise InvalidCover("input cover does not validate")
    sources = instance.sources
    current = cover
    steps = 0
    while True:
        q = _membership(current, sources)
        verts = sorted(q)
        pair = next(
            ((u, v) for u, v in itertools.combinations(verts, 2) if q[u] == q[v]),
            None,
        )
        if pair is None:
            return current, steps
        u, v = pair
        new = []
        for i, w in enumerate(current.witnesses):
            if i in q[u]:
                w = _cut(w, u, v) if w.index(u) < w.index(v) else _cut(w, v, u)
            new.append(w)
        current = PathCover(tuple(new))
        steps += 1


def compact_path_cover(instance: Instance, cover: PathCover) -> PathCover:
    return compact_path_cover_counted(instance, cover)[0]
