import itertools
import random

import pytest
from hypothesis import given, settings

from conftest import rng_of, seeds
from sortpoint.errors import InvalidInput, InvalidSourceSolution
from sortpoint.instance_model import Variant, validate_solution
from sortpoint.oracle import solve_exact
from sortpoint.reductions import (
    ThreePartitionInput,
    check_reduction,
    gen_3partition,
    gen_3sat22_rspp_pl,
    gen_3sat22_spp,
    parse_source,
    random_sat22,
    sample_formula,
    sat22_from_literals,
    solve_source_problem,
    witness_from_source_solution,
)

EXAMPLE = ThreePartitionInput(2, 38, (10, 11, 12, 13, 14, 16))


def random_partition_input(rng: random.Random) -> ThreePartitionInput:
    """A strict YES input built from random triples."""
    m = rng.randint(1, 3)
    while True:
        B = rng.randint(12, 80)
        window = [x for x in range(1, B) if 4 * x > B and 2 * x < B]
        triples = []
        for _ in range(m):
            window = [x for x in window if all(x not in t for t in triples)]
            opts = [t for t in itertools.combinations(window, 3) if sum(t) == B]
            if not opts:
                break
            triples.append(rng.choice(opts))
        flat = [x for t in triples for x in t]
        if len(triples) == m and len(set(flat)) == len(flat):
            rng.shuffle(flat)
            return ThreePartitionInput(m, B, tuple(flat))


def test_input_checks():
    with pytest.raises(InvalidInput):
        ThreePartitionInput(2, 38, (10, 11, 12, 13, 14, 15))
    with pytest.raises(InvalidInput):
        ThreePartitionInput(1, 3, (1, 1, 1))
    assert ThreePartitionInput(1, 3, (1, 1, 1), strict=False).ints == (1, 1, 1)
    with pytest.raises(InvalidInput):
        sat22_from_literals(3, [(1, 1, 2), (-1, -1, -2)])


def test_example_partition():
    assert sorted(map(sorted, solve_source_problem(EXAMPLE))) == [[10, 12, 16], [11, 13, 14]]
    assert solve_source_problem(ThreePartitionInput(2, 4, (1, 1, 1, 1, 1, 3), strict=False)) is None


@given(seeds)
def test_formula_solver_matches_truth_table(seed):
    f = random_sat22(rng_of(seed).choice([3, 6]), rng_of(seed))
    table = [bits for bits in itertools.product((False, True), repeat=f.n) if f.satisfied_by(bits)]
    got = solve_source_problem(f)
    assert (got is None) == (not table)
    if got is not None:
        assert f.satisfied_by(got)


@pytest.mark.parametrize("routed", [False, True])
def test_example_partition_gadget(routed):
    inst = gen_3partition(EXAMPLE, routed=routed)
    rep = check_reduction(inst, EXAMPLE)
    assert rep.passed, rep.details
    assert inst.graph.n == (2 * 2 * 38 + 4) + 6 + 2 * 2 * 38
    h = witness_from_source_solution(inst, EXAMPLE, solve_source_problem(EXAMPLE))
    assert validate_solution(inst, h).valid
    lab = inst.graph.labels
    main = {v for v in range(inst.graph.n) if lab[v].startswith(("s_", "s'_", "w_", "r_"))}
    assert len(main) == 2 * 2 * 38 + 4
    assert all(h.out_degree(v) == (2 if v in main else 0) for v in range(inst.graph.n))


@settings(max_examples=15)
@given(seeds)
def test_partition_gadgets_on_random_inputs(seed):
    inp = random_partition_input(rng_of(seed))
    for routed in (False, True):
        inst = gen_3partition(inp, routed)
        assert check_reduction(inst, inp).passed
        h = witness_from_source_solution(inst, inp, solve_source_problem(inp))
        assert validate_solution(inst, h).valid


@given(seeds)
def test_formula_gadgets_and_witnesses(seed):
    f = random_sat22(3 * rng_of(seed).randint(1, 2), rng_of(seed))
    sol = solve_source_problem(f)
    for gen, target in ((gen_3sat22_rspp_pl, 2), (gen_3sat22_spp, 4)):
        inst = gen(f)
        rep = check_reduction(inst, f)
        assert rep.passed, rep.details
        assert inst.target == target
        h = witness_from_source_solution(inst, f, sol)
        assert validate_solution(inst, h).valid


def test_routed_formula_degree_remark_flagged():
    f = sample_formula()
    rep = check_reduction(gen_3sat22_spp(f), f)
    assert rep.passed
    assert rep.flags == {"c~ has 3 in- and 8 out-edges": False, "literals have 3 in- and 8 out-edges": True}


def test_bad_assignment_rejected():
    f = sample_formula()
    inst = gen_3sat22_rspp_pl(f)
    bad = next(b for b in itertools.product((False, True), repeat=3) if not f.satisfied_by(b))
    with pytest.raises(InvalidSourceSolution):
        witness_from_source_solution(inst, f, bad)


def test_micro_partition_decision():
    inp = ThreePartitionInput(1, 3, (1, 1, 1), strict=False)
    want = solve_source_problem(inp) is not None
    inst = gen_3partition(inp)
    assert (solve_exact(inst) is not None) == want
    assert check_reduction(inst, inp).passed


def test_parse_source():
    assert parse_source("3partition: {m: 2, B: 38, ints: [10, 11, 12, 13, 14, 16]}") == EXAMPLE
    assert parse_source("sat22: {n: 3, clauses: [[1, 2, 3], [1, -2, -3], [-1, 2, -3], [-1, -2, 3]]}") == sample_formula()
    with pytest.raises(InvalidInput):
        parse_source("cnf: {}")
