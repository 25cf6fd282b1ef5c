import random

from hypothesis import given

from conftest import rng_of, seeds
from sortpoint.errors import InfeasibleExhaustive
from sortpoint.graph_core import Digraph
from sortpoint.instance_model import Commodity, Instance, Variant, validate_solution
from sortpoint.oracle import solve_exact
from sortpoint.randgen import random_digraph, random_instance, random_walk_to
from sortpoint.rspp_colorcoding import (
    UNUSED,
    ColorCodingConfig,
    Coloring,
    Template,
    coloring_family,
    default_trials,
    enumerate_templates,
    gamma_of,
    normalize_sccs,
    solve_colorful_rspp,
    solve_rspp_by_commodities,
    template_discarded,
)


def test_family_sizes():
    d = Digraph.from_edges(3, [(0, 1), (1, 2)])
    assert len(list(coloring_family(d, [0, 1, 2], 3))) == 1
    assert len(list(coloring_family(Digraph.from_edges(1, []), [], 5))) == 5
    fam = list(coloring_family(d, [0, 2], 4))
    assert len(fam) == 2 and {c.color_of[1] for c in fam} == {2, 3}
    assert all(c.color_of[0] == 0 and c.color_of[2] == 1 for c in fam)


def test_random_family_is_reproducible():
    d = random_digraph(random.Random(3), 8)
    a = list(coloring_family(d, [0, 1], 6, "random", seed=9, trials=20))
    b = list(coloring_family(d, [0, 1], 6, "random", seed=9, trials=20))
    assert a == b and len(a) == 20


def test_designated_set_colorful_within_budget():
    d = Digraph.from_edges(10, [])
    terminals = [0, 1]
    gamma = gamma_of(2)
    target = [4, 5, 6, 7]
    budget = default_trials(gamma)
    hits = 0
    for meta in range(1000):
        for col in coloring_family(d, terminals, gamma, "random", seed=meta, trials=budget):
            if len({col.color_of[v] for v in target}) == 4:
                hits += 1
                break
    assert hits >= 990


def test_direct_edge_template():
    d = Digraph.from_edges(2, [(0, 1)])
    inst = Instance(Variant.RSPP, d, (Commodity(0, 1),), 2)
    col = Coloring((0, 1), gamma_of(1))
    h = solve_colorful_rspp(inst, col)
    assert h is not None and (0, 1) in h.edges


def test_terminal_edge_outside_closure_is_discarded():
    d = Digraph.from_edges(3, [(0, 2), (1, 2)])
    inst = Instance(Variant.RSPP, d, (Commodity(0, 2), Commodity(1, 2)), 2)
    bad = Template((0, 1, 2), frozenset({(0, 1), (1, 2)}), ((0, 1, 2), (1, 2)))
    assert template_discarded(inst, bad) == "terminal edge outside closure"


def test_worked_and_empty(worked_rspp):
    out = solve_rspp_by_commodities(worked_rspp)
    assert out.decision and out.detail["path"] == "t1"
    empty = Instance(Variant.RSPP, worked_rspp.graph, (), 0)
    out = solve_rspp_by_commodities(empty)
    assert out.decision and not out.graph.edges


@given(seeds)
def test_templates_are_unions_of_paths(seed):
    rng = rng_of(seed)
    inst = random_instance(rng, Variant.RSPP, rng.randint(3, 5), rng.randint(1, 2), 2, density=0.4)
    free = [v for v in range(inst.graph.n) if v not in inst.terminals]
    gamma = gamma_of(inst.k)
    col = next(coloring_family(inst.graph, sorted(inst.terminals), gamma, "random", seed=seed, trials=1, free=free))
    seen = set()
    for t in enumerate_templates(inst, col):
        assert t.edges not in seen
        seen.add(t.edges)
        union = set()
        for c, path in zip(inst.commodities, t.paths):
            assert path[0] == c.source and path[-1] == c.destination
            union.update(zip(path, path[1:]))
        assert union == set(t.edges)


@given(seeds)
def test_exhaustive_mode_matches_oracle(seed):
    rng = rng_of(seed)
    inst = random_instance(rng, Variant.RSPP, rng.randint(2, 6), rng.randint(1, 3), 2, density=rng.choice([0.25, 0.35]))
    try:
        out = solve_rspp_by_commodities(inst, ColorCodingConfig(exhaustive_cap=20_000))
    except InfeasibleExhaustive:
        out = solve_rspp_by_commodities(inst, ColorCodingConfig(mode="random", seed=seed))
    assert out.decision == (solve_exact(inst) is not None)
    if out.decision:
        assert validate_solution(inst, out.graph).valid


@given(seeds)
def test_scc_normalization(seed):
    rng = rng_of(seed)
    inst = random_instance(rng, Variant.RSPP, rng.randint(3, 7), rng.randint(1, 3), 0, density=0.4)
    d = inst.graph
    # a random solution: random closure walks plus random extra closure edges
    edges = set()
    for c in inst.commodities:
        w = random_walk_to(rng, d, c.source, c.destination)
        edges.update(zip(w, w[1:]))
    closure = [(a, b) for a in range(d.n) for b in range(d.n) if a != b and d.reaches(a, b)]
    edges.update(rng.sample(closure, min(len(closure), rng.randint(0, 6))))
    h = d.with_edges(edges)
    inst = inst.with_target(h.max_out_degree())
    assert validate_solution(inst, h).valid
    g = normalize_sccs(inst, h)
    assert validate_solution(inst, g).valid
    assert all(g.out_degree(v) <= h.out_degree(v) for v in range(d.n))
    for s in inst.sources:
        assert g.reach_bits[s] == h.reach_bits[s]
