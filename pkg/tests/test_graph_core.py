import itertools

import networkx as nx
import pytest
from hypothesis import given

from conftest import rng_of, seeds
from sortpoint.errors import CycleDetected, InvalidPrefix, ValidationError
from sortpoint.graph_core import Digraph, strongly_connected_components, topological_order, transitive_closure, undirected_ball
from sortpoint.randgen import random_digraph


def test_rejects_self_loop_and_bad_endpoint():
    with pytest.raises(ValidationError):
        Digraph.from_edges(2, [(0, 0)])
    with pytest.raises(ValidationError):
        Digraph.from_edges(2, [(0, 2)])


def test_closure_of_path():
    d = Digraph.from_edges(3, [(0, 1), (1, 2)])
    assert transitive_closure(d).edges == {(0, 1), (1, 2), (0, 2)}
    assert transitive_closure(Digraph.from_edges(0, [])).edges == frozenset()


def test_worked_closure_contains_long_pair(worked_spp):
    lab = worked_spp.graph.labels
    assert worked_spp.graph.reaches(lab.index("v1"), lab.index("v2"))


@given(seeds)
def test_closure_matches_networkx(seed):
    rng = rng_of(seed)
    d = random_digraph(rng, rng.randint(0, 7), rng.random() * 0.5)
    g = nx.DiGraph(list(d.edges))
    g.add_nodes_from(range(d.n))
    want = {(a, b) for a in g for b in nx.descendants(g, a)}
    assert set(transitive_closure(d).edges) == want


def test_scc_basics():
    assert len(strongly_connected_components(Digraph.from_edges(3, [(0, 1), (1, 2)])).components) == 3
    assert strongly_connected_components(Digraph.from_edges(2, [(0, 1), (1, 0)])).components == (frozenset({0, 1}),)


@given(seeds)
def test_scc_partition_and_order(seed):
    rng = rng_of(seed)
    d = random_digraph(rng, rng.randint(1, 6), 0.3)
    part = strongly_connected_components(d)
    for u in range(d.n):
        for v in range(d.n):
            same = u == v or (d.reaches(u, v) and d.reaches(v, u))
            assert (part.component_of[u] == part.component_of[v]) == same
    for u, v in d.edges:
        assert part.component_of[u] <= part.component_of[v]


def test_topological_order_examples():
    assert topological_order(Digraph.from_edges(1, [])) == [0]
    assert topological_order(Digraph.from_edges(2, [(0, 1)]), [0]) == [0, 1]
    with pytest.raises(CycleDetected):
        topological_order(Digraph.from_edges(2, [(0, 1), (1, 0)]))
    with pytest.raises(InvalidPrefix):
        topological_order(Digraph.from_edges(2, [(0, 1)]), [1])


@given(seeds)
def test_topological_order_on_random_dags(seed):
    rng = rng_of(seed)
    n = rng.randint(1, 7)
    perm = rng.sample(range(n), n)
    d = Digraph.from_edges(n, [(perm[i], perm[j]) for i, j in itertools.combinations(range(n), 2) if rng.random() < 0.4])
    sources = [v for v in range(n) if not d.pred[v]]
    prefix = sources[:1]
    order = topological_order(d, prefix)
    pos = {v: i for i, v in enumerate(order)}
    assert sorted(order) == list(range(n))
    assert order[: len(prefix)] == prefix
    assert all(pos[u] < pos[v] for u, v in d.edges)


def test_ball_examples():
    star = Digraph.from_edges(4, [(0, 1), (2, 0), (0, 3)])
    assert undirected_ball(star, {2}, 0) == {2}
    assert undirected_ball(star, {0}, 1) == {0, 1, 2, 3}


@given(seeds)
def test_ball_matches_shortest_paths(seed):
    rng = rng_of(seed)
    d = random_digraph(rng, rng.randint(1, 8), 0.2)
    g = nx.Graph(list(d.edges))
    g.add_nodes_from(range(d.n))
    s = set(rng.sample(range(d.n), rng.randint(1, d.n)))
    p = rng.randint(0, 3)
    dist = {}
    for v in s:
        for w, k in nx.single_source_shortest_path_length(g, v).items():
            dist[w] = min(dist.get(w, k), k)
    assert undirected_ball(d, s, p) == {w for w, k in dist.items() if k <= p}
