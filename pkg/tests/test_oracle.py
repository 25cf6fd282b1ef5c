import pytest
from hypothesis import given

from conftest import rng_of, seeds
from sortpoint.errors import BudgetExceeded, InvalidCover
from sortpoint.graph_core import Digraph
from sortpoint.instance_model import Commodity, Instance, PathCover, Variant, validate_cover, validate_solution, witness_is_legal
from sortpoint.oracle import (
    OracleConfig,
    compact_path_cover,
    compact_path_cover_counted,
    min_target_exact,
    solve_by_subgraphs,
    solve_exact,
    witnesses,
)
from sortpoint.randgen import random_instance, random_valid_cover


def test_worked_targets(worked_spp, worked_rspp):
    cover = solve_exact(worked_spp)
    assert cover is not None and validate_cover(worked_spp, cover)
    assert solve_exact(worked_spp.with_target(1)) is None
    assert min_target_exact(worked_spp.graph, worked_spp.commodities, "SPP") == 2
    assert min_target_exact(worked_rspp.graph, worked_rspp.commodities, "RSPP") == 1
    assert min_target_exact(worked_rspp.graph, (), "RSPP") == 0


def test_single_direct_edge():
    inst = Instance(Variant.RSPP, Digraph.from_edges(2, [(0, 1)]), (Commodity(0, 1),), 1)
    assert solve_exact(inst).witnesses == ((0, 1),)


def test_unroutable_has_no_target():
    d = Digraph.from_edges(2, [(0, 1)])
    assert min_target_exact(d, (Commodity(1, 0),), "RSPP") is None


def test_budget_is_not_no():
    d = Digraph.from_edges(6, [(a, b) for a in range(6) for b in range(6) if a != b])
    inst = Instance(Variant.RSPP, d, (Commodity(0, 5),), 1)
    with pytest.raises(BudgetExceeded):
        solve_exact(inst, OracleConfig(max_witnesses_per_commodity=5))


@given(seeds)
def test_witnesses_are_legal(seed):
    rng = rng_of(seed)
    variant = rng.choice(list(Variant))
    inst = random_instance(rng, variant, rng.randint(2, 6), 2, 1, p=3 if variant is Variant.RSPP_PL else None)
    for i in range(inst.k):
        ws = witnesses(inst, i)
        assert len(ws) == len(set(ws))
        assert all(witness_is_legal(inst, i, w) for w in ws)


@given(seeds)
def test_two_brute_forces_agree(seed):
    rng = rng_of(seed)
    variant = rng.choice(list(Variant))
    inst = random_instance(rng, variant, rng.randint(2, 6), rng.randint(1, 3), 0, density=0.35, p=rng.randint(1, 3) if variant is Variant.RSPP_PL else None)
    for t in range(4):
        probe = inst.with_target(t)
        cover = solve_exact(probe)
        h = solve_by_subgraphs(probe)
        assert (cover is None) == (h is None)
        if cover is not None:
            assert validate_cover(probe, cover)
            assert validate_solution(probe, h).valid


def test_compaction_fixpoint_and_example():
    d = Digraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    inst = Instance(Variant.SPP, d, (Commodity(0, 3, (0, 1, 2, 3)),), 1)
    cover = PathCover(((0, 1, 2, 3),))
    small = compact_path_cover(inst, cover)
    assert len(small.vertices()) <= 3 and validate_cover(inst, small)
    assert compact_path_cover(inst, small) == small


def test_compaction_rejects_invalid_cover():
    d = Digraph.from_edges(3, [(0, 1), (1, 2)])
    inst = Instance(Variant.RSPP, d, (Commodity(0, 2),), 1)
    with pytest.raises(InvalidCover):
        compact_path_cover(inst, PathCover(((0, 1),)))


@given(seeds)
def test_compaction_bound(seed):
    rng = rng_of(seed)
    k = rng.randint(1, 3)
    inst, cover = random_valid_cover(rng, rng.randint(3, 8), k, rng.choice([Variant.SPP, Variant.RSPP]))
    small, steps = compact_path_cover_counted(inst, cover)
    assert validate_cover(inst, small)
    assert len(small.vertices()) <= 2**k + k
    assert steps < k * inst.graph.n
