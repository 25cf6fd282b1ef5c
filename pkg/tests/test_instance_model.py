import pytest
from hypothesis import given

from conftest import CORPUS, rng_of, seeds
from sortpoint.codec import dump_instance, dump_solution, parse_instance, parse_solution
from sortpoint.errors import ParseError, ValidationError
from sortpoint.graph_core import Digraph
from sortpoint.instance_model import Commodity, Instance, Variant, trivial_yes_check, validate_solution
from sortpoint.oracle import solve_exact
from sortpoint.randgen import random_instance


def test_worked_document_shape(worked_spp):
    assert (worked_spp.graph.n, len(worked_spp.graph.edges), worked_spp.k) == (6, 7, 5)


def test_shipped_worked_solution_valid(worked_spp):
    h = parse_solution((CORPUS / "solutions" / "worked_spp_T2.yaml").read_text(), worked_spp)
    rep = validate_solution(worked_spp, h)
    assert rep.valid and rep.max_outdegree == 2
    assert not validate_solution(worked_spp.with_target(1), h).valid


def test_rspp_outdegree_one_solution(worked_rspp):
    lab = worked_rspp.graph.labels
    pairs = [("v1", "v2"), ("v2", "v4"), ("v3", "v2"), ("v4", "v6"), ("v6", "v5")]
    h = worked_rspp.graph.with_edges((lab.index(a), lab.index(b)) for a, b in pairs)
    assert validate_solution(worked_rspp, h).valid


def test_empty_instance():
    inst = Instance(Variant.RSPP, Digraph.from_edges(2, [(0, 1)]), (), 0)
    assert validate_solution(inst, inst.graph.with_edges(())).valid
    assert trivial_yes_check(inst).edges == frozenset()
    again = parse_instance(dump_instance(inst))
    assert again == inst


def test_report_fields():
    d = Digraph.from_edges(3, [(0, 1), (1, 2)])
    inst = Instance(Variant.RSPP, d, (Commodity(0, 2),), 0)
    rep = validate_solution(inst, d.with_edges([(0, 2)]))
    assert rep.is_subgraph_of_closure and rep.offending_vertices == (0,) and not rep.valid
    rep = validate_solution(inst, d.with_edges([(2, 0)]))
    assert not rep.is_subgraph_of_closure and rep.foreign_edges == ((2, 0),)
    assert rep.unsatisfied_commodities == (0,)


def test_invariants_enforced():
    d = Digraph.from_edges(3, [(0, 1), (1, 2)])
    with pytest.raises(ValidationError):
        Instance(Variant.SPP, d, (Commodity(0, 2),), 1)
    with pytest.raises(ValidationError):
        Instance(Variant.SPP, d, (Commodity(0, 2, (0, 2)),), 1)
    with pytest.raises(ValidationError):
        Instance(Variant.RSPP_PL, d, (Commodity(0, 2),), 1)
    with pytest.raises(ValidationError):
        Commodity(1, 1)


@given(seeds)
def test_round_trip(seed):
    rng = rng_of(seed)
    variant = rng.choice(list(Variant))
    inst = random_instance(rng, variant, rng.randint(2, 6), rng.randint(0, 3), rng.randint(0, 3), p=3 if variant is Variant.RSPP_PL else None)
    assert parse_instance(dump_instance(inst, {"seed": seed})) == inst
    h = inst.graph
    assert parse_solution(dump_solution(inst, h), inst) == h


@given(seeds)
def test_mutated_documents_fail_cleanly(seed):
    rng = rng_of(seed)
    text = (CORPUS / "worked_spp.yaml").read_text()
    lines = text.splitlines()
    i = rng.randrange(len(lines))
    mutations = [
        lambda s: s.replace("v", "w", 1),
        lambda s: s.replace(":", "", 1),
        lambda s: s + " ]",
        lambda s: s.replace("2", "-2"),
        lambda s: "bogus: 1",
        lambda s: "",
    ]
    lines[i] = rng.choice(mutations)(lines[i])
    try:
        parse_instance("\n".join(lines))
    except (ParseError, ValidationError):
        pass


def test_parse_error_carries_line():
    with pytest.raises(ParseError) as info:
        parse_instance("problem: SPP\nvertices: [a]\nedges: []\ncommodities: []\ntarget: 0\nextra: 1\n")
    assert info.value.line == 6


@given(seeds)
def test_trivial_yes_is_sufficient(seed):
    rng = rng_of(seed)
    inst = random_instance(rng, Variant.RSPP, rng.randint(2, 6), rng.randint(1, 3), 0)
    for t in range(4):
        probe = inst.with_target(t)
        h = trivial_yes_check(probe)
        if h is not None:
            assert validate_solution(probe, h).valid
            assert solve_exact(probe) is not None
