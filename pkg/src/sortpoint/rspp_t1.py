"""Polynomial decision and construction for free routing at target 1.

The working graph H starts as one edge per commodity.  Strongly connected
pieces are turned into single cycles, cycles absorb every commodity that
leaves them, and the remaining acyclic part is walked in topological order,
trading each vertex's surplus out-edges for edges further down the order.
Any cycle built here visits its vertices in ascending index order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidVariant, PreconditionViolated
from .graph_core import Digraph, Edge, strongly_connected_components, topological_order
from .instance_model import Instance, Variant, validate_solution


@dataclass
class T1State:
    closure: Digraph  # only used for reachability queries
    edges: set[Edge]
    cycle_of: dict[int, int] = field(default_factory=dict)
    cycles: dict[int, tuple[int, ...]] = field(default_factory=dict)
    cycle_vertices: set[int] = field(default_factory=set)  # V-bar
    visited: list[int] = field(default_factory=list)  # W, in visiting order
    order: list[int] = field(default_factory=list)
    _next_id: int = 0

    def copy(self) -> "T1State":
        return T1State(
            self.closure,
            set(self.edges),
            dict(self.cycle_of),
            dict(self.cycles),
            set(self.cycle_vertices),
            list(self.visited),
            list(self.order),
            self._next_id,
        )

    def graph(self) -> Digraph:
        return self.closure.with_edges(self.edges)

    def out(self, v: int) -> list[int]:
        return sorted(w for u, w in self.edges if u == v)

    def add_cycle(self, vertices) -> None:
        ring = tuple(sorted(vertices))
        inside = set(ring)
        # edges among the new cycle's vertices are subsumed by the cycle
        self.edges = {(u, w) for u, w in self.edges if not (u in inside and w in inside)}
        self.edges.update(zip(ring, ring[1:] + ring[:1]))
        cid = self._next_id
        self._next_id += 1
        self.cycles[cid] = ring
        for v in ring:
            self.cycle_of[v] = cid
        self.cycle_vertices.update(ring)

    def drop_cycle(self, cid: int) -> tuple[int, ...]:
        ring = self.cycles.pop(cid)
        self.edges.difference_update(zip(ring, ring[1:] + ring[:1]))
        for v in ring:
            del self.cycle_of[v]
        return ring


def _merge(state: T1State, a: int, b: int) -> None:
    if a not in state.cycle_of:
        raise PreconditionViolated(f"vertex {a} is not on a cycle")
    ca = state.cycle_of[a]
    if b in state.cycle_of and state.cycle_of[b] == ca:
        return
    ring = set(state.drop_cycle(ca))
    if b in state.cycle_of:
        ring |= set(state.drop_cycle(state.cycle_of[b]))
    else:
        ring.add(b)
    state.add_cycle(ring)


def merge_cycles(state: T1State, a: int, b: int) -> T1State:
    """Replace a's cycle (and b's, if any) by one cycle through all of them and b."""
    new = state.copy()
    _merge(new, a, b)
    return new


class _No(Exception):
    pass


def _check_invariants(state: T1State, instance: Instance, phase3: bool) -> None:
    closure = state.closure
    assert all(closure.reaches(u, v) for u, v in state.edges), "H left the closure"
    rep = validate_solution(instance.with_target(instance.graph.n), state.edges)
    assert not rep.unsatisfied_commodities, "a commodity lost its path"
    if phase3:
        rest = [v for v in range(closure.n) if v not in state.cycle_vertices]
        topological_order(state.graph(), state.visited, rest)


def solve_rspp_target1(instance: Instance, *, debug: bool = False, literal_case2: bool = False) -> Digraph | None:
    """Solution graph with outdegree at most 1, or None for a NO instance.

    ``literal_case2`` selects how the "exactly one endpoint on a cycle" case
    treats the off-cycle endpoint t' after adding (t', t): when set, t' joins
    the cycle set as the step is usually phrased; by default t' stays in the
    acyclic part and has its own out-edges resolved when its turn comes.
    Only the default is exact (see the test suite for a counterexample).
    """
    if instance.variant is not Variant.RSPP or instance.target > 1:
        raise InvalidVariant("solve_rspp_target1 needs an RSPP instance with target <= 1")
    d = instance.graph
    if instance.k == 0:
        return d.with_edges(())
    if instance.target == 0:
        return None
    if not all(d.reaches(c.source, c.destination) for c in instance.commodities):
        return None
    try:
        state = _run(instance, debug, literal_case2)
    except _No:
        return None
    return state.graph()


def _run(instance: Instance, debug: bool, literal_case2: bool) -> T1State:
    d = instance.graph
    n = d.n
    closure = d  # reach_bits of D answer closure membership directly
    state = T1State(closure, {c.pair for c in instance.commodities})

    # Phase 1: every nontrivial strongly connected piece becomes one cycle
    for comp in strongly_connected_components(state.graph()).components:
        if len(comp) >= 2:
            state.add_cycle(comp)
    if debug:
        _check_invariants(state, instance, False)

    # Phase 2: cycles swallow the destinations of commodities leaving them
    while True:
        pick = next(
            (
                c
                for c in instance.commodities
                if c.source in state.cycle_of
                and state.cycle_of.get(c.destination) != state.cycle_of[c.source]
            ),
            None,
        )
        if pick is None:
            break
        if not closure.reaches(pick.destination, pick.source):
            raise _No
        _merge(state, pick.source, pick.destination)
        if debug:
            _check_invariants(state, instance, False)

    # Phase 3: walk the acyclic remainder in topological order
    def rest():
        return [v for v in range(n) if v not in state.cycle_vertices]

    state.order = topological_order(state.graph(), (), rest())
    while True:
        pos = {v: i for i, v in enumerate(state.order)}
        s = next((v for v in state.order if v not in state.visited and v not in state.cycle_vertices), None)
        if s is None:
            break
        state.visited.append(s)
        while True:
            outs = state.out(s)
            if len(outs) < 2:
                break
            # cycle vertices first, then by position, so the case split is stable
            outs.sort(key=lambda w: (w not in state.cycle_vertices, pos.get(w, -1), w))
            t, t2 = outs[0], outs[1]
            in_t, in_t2 = t in state.cycle_vertices, t2 in state.cycle_vertices
            if in_t and in_t2:
                if not (closure.reaches(t, t2) and closure.reaches(t2, t)):
                    raise _No
                _merge(state, t, t2)
                state.edges.discard((s, t2))
            elif in_t:
                # t on a cycle, t2 not
                if not closure.reaches(t2, t):
                    raise _No
                state.edges.add((t2, t))
                state.edges.discard((s, t))
                if literal_case2:
                    state.cycle_vertices.add(t2)
                    state.order = [v for v in state.order if v != t2]
            else:
                if not closure.reaches(t, t2) and not closure.reaches(t2, t):
                    raise _No
                if closure.reaches(t, t2):
                    state.edges.add((t, t2))
                    state.edges.discard((s, t2))
                else:
                    state.edges.add((t2, t))
                    state.edges.discard((s, t))
                    state.order = topological_order(state.graph(), state.visited, rest())
                    pos = {v: i for i, v in enumerate(state.order)}
            if debug:
                _check_invariants(state, instance, True)
    return state
