import pytest
from hypothesis import assume, given

from conftest import rng_of, seeds
from sortpoint.codec import parse_decomposition
from sortpoint.errors import StateSpaceExceeded
from sortpoint.graph_core import Digraph
from sortpoint.instance_model import Commodity, Instance, Variant, validate_solution
from sortpoint.oracle import solve_exact
from sortpoint.randgen import random_bounded_instance
from sortpoint.treedec import FORGET, build_nice_tree_decomposition
from sortpoint.twdp import TwdpConfig, solve_twdp, table_states

RAW = TwdpConfig(use_observation=False)


def test_no_commodities():
    inst = Instance(Variant.SPP, Digraph.from_edges(2, [(0, 1)]), (), 0)
    out = solve_twdp(inst)
    assert out.decision and not out.graph.edges


def test_worked(worked_spp):
    assert solve_twdp(worked_spp, cfg=RAW).decision
    assert not solve_twdp(worked_spp.with_target(1), cfg=RAW).decision


@given(seeds)
def test_matches_oracle(seed):
    rng = rng_of(seed)
    variant = rng.choice([Variant.SPP, Variant.RSPP_PL])
    inst = random_bounded_instance(rng, variant, rng.randint(3, 8), rng.randint(1, 4), rng.randint(1, 2), rng.randint(1, 3))
    want = solve_exact(inst) is not None
    for scope in ("ball", "global"):
        out = solve_twdp(inst, cfg=TwdpConfig(use_observation=False, closure_scope=scope))
        assert out.decision == want
        if out.decision:
            assert validate_solution(inst, out.graph).valid


@given(seeds)
def test_state_invariants(seed):
    rng = rng_of(seed)
    variant = rng.choice([Variant.SPP, Variant.RSPP_PL])
    inst = random_bounded_instance(rng, variant, rng.randint(3, 7), rng.randint(1, 3), rng.randint(1, 2), 2)
    assume(inst.k > 0)
    td = build_nice_tree_decomposition(inst.graph)
    tables = table_states(inst, td)
    T = inst.target
    for states in tables:
        for st in states:
            for v in st.ball:
                out = sum(1 for a, _ in st.R if a == v)
                assert 0 <= st.degree(v) <= T and out <= st.degree(v)
    for idx, node in enumerate(td.nodes):
        if node.kind != FORGET:
            continue
        child = tables[node.children[0]]
        for st in tables[idx]:
            keep = set(st.ball)
            assert any(
                frozenset(e for e in c.R if e[0] in keep and e[1] in keep) == st.R
                and all(c.degree(v) == st.degree(v) for v in st.ball)
                for c in child
            )


@given(seeds)
def test_unroutable_on_trees_is_no(seed):
    rng = rng_of(seed)
    n = rng.randint(3, 8)
    d = Digraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    inst = Instance(Variant.RSPP_PL, d, (Commodity(0, 2), Commodity(n - 1, 0)), 1, 2)
    for t in range(3):
        assert not solve_twdp(inst.with_target(t), cfg=RAW).decision


def test_state_cap(worked_spp):
    with pytest.raises(StateSpaceExceeded):
        solve_twdp(worked_spp, cfg=TwdpConfig(use_observation=False, state_cap=3))


def test_supplied_decomposition(worked_spp):
    doc = "bags: [[v1, v3], [v3, v4, v6], [v2, v3, v4], [v3, v5]]\nedges: [[0, 1], [1, 2], [1, 3]]\n"
    td = parse_decomposition(doc, worked_spp)
    assert td.width == 2
    assert solve_twdp(worked_spp, td, cfg=RAW).decision
