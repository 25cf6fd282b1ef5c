"""Dynamic program over a nice tree decomposition for bounded route length.

A state at node b is a pair (d, R): R is the part of the solution on the
ball N(b) of undirected radius p around the bag, and d records the full
outdegree of every ball vertex.  Tables run leaf to root; a non-empty root
table means YES and the provenance links rebuild one solution.

Two reductions keep the tables small without changing the answer.  Edges
are drawn only from pairs that can ever lie on a legal witness (any
solution trimmed to its witnesses uses nothing else), and among states with
the same R only pointwise-minimal d vectors are kept (smaller recorded
degrees never block a later step).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import InvalidVariant, StateSpaceExceeded
from .graph_core import Digraph, Edge, undirected_ball
from .instance_model import (
    Instance,
    SolveOutcome,
    Variant,
    base_paths,
    commodity_satisfied,
    trivial_yes_check,
    validate_solution,
)
from .treedec import FORGET, INTRODUCE, JOIN, LEAF, NiceTreeDecomposition, build_nice_tree_decomposition


@dataclass(frozen=True)
class TwdpConfig:
    state_cap: int = 1_000_000
    step_cap: int = 2_000_000  # candidate extensions examined, over all introduce nodes
    # "ball": an edge of R at an introduce node must be realizable inside the
    # ball; "global": any closure edge of D
    closure_scope: str = "ball"
    use_observation: bool = True
    td_mode: str = "auto"
    exact_cap: int = 14


@dataclass(frozen=True)
class DPState:
    ball: tuple[int, ...]
    d: tuple[int, ...]
    R: frozenset[Edge]

    def degree(self, v: int) -> int:
        return self.d[self.ball.index(v)]


@dataclass
class TableStats:
    largest: int = 0
    total: int = 0
    per_node: list[int] = field(default_factory=list)


def useful_edges(instance: Instance, p: int) -> frozenset[Edge]:
    pool: set[Edge] = set()
    d = instance.graph
    for c in instance.commodities:
        paths = [c.route] if instance.variant is Variant.SPP else base_paths(d, c.source, c.destination, p)
        for bp in paths:
            pool.update((bp[i], bp[j]) for i in range(len(bp)) for j in range(i + 1, len(bp)))
    return frozenset(pool)


def _ball_reach(d: Digraph, ball: frozenset[int]) -> set[Edge]:
    sub = d.induced(ball)
    return {(a, b) for a in ball for b in ball if a != b and sub.reaches(a, b)}


def _pareto(group: dict[tuple, object]) -> dict[tuple, object]:
    keep: dict[tuple, object] = {}
    for dv in sorted(group, key=lambda x: (sum(x), x)):
        if not any(all(a <= b for a, b in zip(k, dv)) for k in keep):
            keep[dv] = group[dv]
    return keep


class _Table:
    """States grouped by R, each R mapping its d vectors to provenance."""

    def __init__(self, ball: tuple[int, ...]):
        self.ball = ball
        self.by_r: dict[frozenset, dict[tuple, object]] = {}

    def add(self, r: frozenset, dv: tuple, prov) -> None:
        self.by_r.setdefault(r, {}).setdefault(dv, prov)

    def prune(self) -> None:
        self.by_r = {r: _pareto(g) for r, g in self.by_r.items()}

    def __len__(self) -> int:
        return sum(len(g) for g in self.by_r.values())

    def states(self):
        for r, g in self.by_r.items():
            for dv, prov in g.items():
                yield r, dv, prov


def _count_subsets(size: int, limit: int) -> int:
    return sum(math.comb(size, j) for j in range(min(limit, size) + 1))


def _subsets(items: list, limit: int) -> list[tuple]:
    return [c for size in range(min(limit, len(items)) + 1) for c in itertools.combinations(items, size)]


def solve_twdp(
    instance: Instance,
    td: NiceTreeDecomposition | None = None,
    p: int | None = None,
    cfg: TwdpConfig | None = None,
    observer=None,
) -> SolveOutcome:
    if instance.variant not in (Variant.SPP, Variant.RSPP_PL):
        raise InvalidVariant("the decomposition DP handles SPP and RSPP_PL")
    cfg = cfg or TwdpConfig()
    d = instance.graph
    T = instance.target
    if p is None:
        p = instance.effective_path_length
    if instance.variant is Variant.SPP and p < instance.effective_path_length:
        raise ValueError("p must cover every route")
    if instance.k == 0:
        return SolveOutcome(True, d.with_edges(()), {"path": "empty"})
    if instance.variant is Variant.RSPP_PL and any(
        next(base_paths(d, c.source, c.destination, p), None) is None for c in instance.commodities
    ):
        return SolveOutcome(False, None, {"path": "unroutable"})
    if cfg.use_observation:
        h = trivial_yes_check(instance)
        if h is not None:
            return SolveOutcome(True, h, {"path": "observation"})
    if td is None:
        td = build_nice_tree_decomposition(d, cfg.td_mode, cfg.exact_cap)

    useful = useful_edges(instance, p)
    global_ok = {e for e in useful if d.reaches(*e)}
    ends: dict[int, list[int]] = {}
    for i, c in enumerate(instance.commodities):
        ends.setdefault(c.source, []).append(i)
        ends.setdefault(c.destination, []).append(i)

    balls = [tuple(sorted(undirected_ball(d, node.bag, p))) for node in td.nodes]
    tables: list[_Table] = []
    stats = TableStats()
    steps = 0

    for idx, node in enumerate(td.nodes):
        ball = balls[idx]
        table = _Table(ball)
        if node.kind == LEAF:
            table.add(frozenset(), tuple(0 for _ in ball), ("leaf",))
        elif node.kind == FORGET:
            child = tables[node.children[0]]
            keep = [child.ball.index(v) for v in ball]
            inside = set(ball)
            for r, dv, _ in child.states():
                nr = frozenset(e for e in r if e[0] in inside and e[1] in inside)
                table.add(nr, tuple(dv[i] for i in keep), ("forget", r, dv))
        elif node.kind == JOIN:
            left, right = (tables[c] for c in node.children)
            for r, group in left.by_r.items():
                other = right.by_r.get(r)
                if not other:
                    continue
                rdeg = [0] * len(ball)
                pos = {v: i for i, v in enumerate(ball)}
                for u, _ in r:
                    rdeg[pos[u]] += 1
                for dv, dv2 in itertools.product(group, other):
                    merged = tuple(a + b - c for a, b, c in zip(dv, dv2, rdeg))
                    if max(merged, default=0) <= T:
                        table.add(r, merged, ("join", r, dv, dv2))
        elif node.kind == INTRODUCE:
            child = tables[node.children[0]]
            old = set(child.ball)
            pos = {v: i for i, v in enumerate(ball)}
            new = [v for v in ball if v not in old]
            allowed = global_ok if cfg.closure_scope == "global" else (useful & _ball_reach(d, frozenset(ball)))
            inside = set(ball)
            new_set = set(new)
            new_out = {u: sorted(w for w in inside if (u, w) in allowed) for u in new}
            old_to_new = {u: sorted(w for w in new_set if (u, w) in allowed) for u in sorted(old)}
            if len(child):
                width = math.prod(_count_subsets(len(new_out[u]), T) for u in new)
                if steps + width > cfg.step_cap:
                    raise StateSpaceExceeded(f"more than {cfg.step_cap} candidate extensions")
            new_opts = [_subsets(new_out[u], T) for u in new]
            checks = ends.get(node.vertex, [])
            old_list = sorted(old)
            for r, dv, _ in child.states():
                cdeg = dict(zip(child.ball, dv))
                old_opts = [_subsets(old_to_new[u], T - cdeg[u]) for u in old_list]
                for old_pick in itertools.product(*old_opts):
                    for new_pick in itertools.product(*new_opts):
                        steps += 1
                        if steps > cfg.step_cap:
                            raise StateSpaceExceeded(f"more than {cfg.step_cap} candidate extensions")
                        add = [(u, w) for u, ws in zip(old_list, old_pick) for w in ws]
                        add += [(u, w) for u, ws in zip(new, new_pick) for w in ws]
                        nr = r | frozenset(add)
                        if checks:
                            bits = [0] * d.n
                            for a, b in nr:
                                bits[a] |= 1 << b
                            if not all(commodity_satisfied(instance, i, bits) for i in checks):
                                continue
                        nd = [0] * len(ball)
                        for u in old_list:
                            nd[pos[u]] = cdeg[u]
                        for a, _ in add:
                            nd[pos[a]] += 1
                        table.add(nr, tuple(nd), ("intro", r, dv, frozenset(add)))
                if len(table) > cfg.state_cap:
                    raise StateSpaceExceeded(f"node {idx}: more than {cfg.state_cap} states")
        table.prune()
        if observer is not None:
            observer(idx, [DPState(ball, dv, r) for r, dv, _ in table.states()])
        if len(table) > cfg.state_cap:
            raise StateSpaceExceeded(f"node {idx}: more than {cfg.state_cap} states")
        stats.largest = max(stats.largest, len(table))
        stats.total += len(table)
        stats.per_node.append(len(table))
        tables.append(table)

    root = tables[td.root]
    detail = {"path": "dp", "width": td.width, "largest_table": stats.largest, "states": stats.total}
    if not len(root):
        return SolveOutcome(False, None, detail)
    r, dv, _ = next(iter(root.states()))
    h = d.with_edges(_rebuild(td, tables, td.root, r, dv))
    if not validate_solution(instance, h).valid:
        raise RuntimeError("rebuilt graph failed validation")
    return SolveOutcome(True, h, detail)


def _rebuild(td: NiceTreeDecomposition, tables: list[_Table], idx: int, r, dv) -> set[Edge]:
    edges: set[Edge] = set()
    stack = [(idx, r, dv)]
    while stack:
        i, r, dv = stack.pop()
        prov = tables[i].by_r[r][dv]
        node = td.nodes[i]
        kind = prov[0]
        if kind == "leaf":
            continue
        if kind == "forget":
            stack.append((node.children[0], prov[1], prov[2]))
        elif kind == "join":
            _, rr, d1, d2 = prov
            stack.append((node.children[0], rr, d1))
            stack.append((node.children[1], rr, d2))
        else:
            _, rr, d1, add = prov
            edges |= add
            stack.append((node.children[0], rr, d1))
    return edges


def table_states(instance: Instance, td: NiceTreeDecomposition, p: int | None = None, cfg: TwdpConfig | None = None):
    """Per node, the candidate states kept by the DP; for structural tests."""
    captured: list[list[DPState]] = []
    solve_twdp(instance, td, p, cfg or TwdpConfig(use_observation=False), observer=lambda idx, states: captured.append(states))
    return captured
