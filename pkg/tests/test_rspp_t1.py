import itertools

from hypothesis import given

from conftest import rng_of, seeds
from sortpoint.codec import read_instance
from sortpoint.graph_core import Digraph
from sortpoint.instance_model import Commodity, Instance, Variant, validate_solution
from sortpoint.oracle import solve_exact
from sortpoint.randgen import digraph_classes, random_instance
from sortpoint.rspp_t1 import solve_rspp_target1
from conftest import CORPUS

# the late-cycle instance on which marking the off-cycle endpoint as settled goes wrong
CASE2 = Instance(
    Variant.RSPP,
    Digraph.from_edges(5, [(0, 2), (2, 3), (3, 4), (4, 3), (1, 2)]),
    tuple(Commodity(s, t) for s, t in [(0, 2), (0, 3), (1, 2), (1, 4), (3, 4), (4, 3)]),
    1,
)


def test_worked_target_one(worked_rspp):
    h = solve_rspp_target1(worked_rspp)
    assert h is not None and validate_solution(worked_rspp, h).valid


def test_target_zero_only_without_commodities():
    d = Digraph.from_edges(2, [(0, 1)])
    assert solve_rspp_target1(Instance(Variant.RSPP, d, (), 0)).edges == frozenset()
    assert solve_rspp_target1(Instance(Variant.RSPP, d, (Commodity(0, 1),), 0)) is None


def test_late_cycle_instance():
    assert solve_exact(CASE2) is not None
    h = solve_rspp_target1(CASE2)
    assert h is not None and validate_solution(CASE2, h).valid
    assert solve_rspp_target1(CASE2, literal_case2=True) is None


def test_corpus_copy_of_late_cycle_instance():
    inst = read_instance(CORPUS / "t1_case2.yaml")
    assert solve_rspp_target1(inst) is not None


def test_all_three_vertex_digraphs():
    for d in digraph_classes(3):
        pairs = [(a, b) for a in range(3) for b in range(3) if a != b]
        for k in range(4):
            for ks in itertools.combinations(pairs, k):
                inst = Instance(Variant.RSPP, d, tuple(Commodity(s, t) for s, t in ks), 1)
                h = solve_rspp_target1(inst)
                assert (h is not None) == (solve_exact(inst) is not None)
                if h is not None:
                    assert validate_solution(inst, h).valid


@given(seeds)
def test_matches_oracle(seed):
    rng = rng_of(seed)
    inst = random_instance(rng, Variant.RSPP, rng.randint(2, 7), rng.randint(1, 4), 1, density=rng.choice([0.2, 0.3, 0.45]))
    h = solve_rspp_target1(inst)
    assert (h is not None) == (solve_exact(inst) is not None)
    if h is not None:
        assert validate_solution(inst, h).valid and h.max_out_degree() <= 1
