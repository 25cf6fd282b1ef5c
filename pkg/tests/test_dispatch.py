import pytest
from hypothesis import given, settings

from conftest import corpus_files, rng_of, seeds
from sortpoint.codec import read_instance
from sortpoint.dispatch import SolverConfig, applicable, choose_algorithm, min_target, solve
from sortpoint.errors import BudgetExceeded, InvalidVariant
from sortpoint.instance_model import Variant, validate_solution
from sortpoint.oracle import OracleConfig, solve_exact
from sortpoint.randgen import random_instance
from sortpoint.treedec import build_nice_tree_decomposition


def test_selection_rules(worked_spp, worked_rspp):
    assert choose_algorithm(worked_rspp) == "t1"
    assert choose_algorithm(worked_rspp.with_target(2)) == "rspp-colorcode"
    assert choose_algorithm(worked_spp.with_target(1)) == "spp-kernel"
    assert choose_algorithm(worked_spp) == "spp-ramsey"
    td = build_nice_tree_decomposition(worked_spp.graph)
    assert choose_algorithm(worked_spp, SolverConfig(decomposition=td)) == "twdp"
    pl = random_instance(rng_of(1), Variant.RSPP_PL, 5, 2, 2, p=3)
    assert choose_algorithm(pl) == "twdp"


def test_inapplicable_algorithm(worked_rspp):
    assert not applicable(worked_rspp, "twdp")
    with pytest.raises(InvalidVariant):
        solve(worked_rspp, "twdp")


def test_auto_falls_back_to_oracle(worked_spp, monkeypatch):
    import sortpoint.dispatch as dispatch

    def boom(*args, **kwargs):
        raise BudgetExceeded("forced")

    monkeypatch.setattr(dispatch, "solve_spp_by_commodities", boom)
    out = solve(worked_spp)
    assert out.decision and out.detail["algorithm"] == "oracle"
    with pytest.raises(BudgetExceeded):
        solve(worked_spp, "spp-ramsey")


def test_min_targets(worked_spp, worked_rspp):
    assert min_target(worked_spp) == 2
    assert min_target(worked_rspp) == 1


@settings(max_examples=40)
@given(seeds)
def test_monotone_in_target_and_matches_oracle(seed):
    rng = rng_of(seed)
    variant = rng.choice(list(Variant))
    inst = random_instance(rng, variant, rng.randint(3, 6), rng.randint(1, 3), 0, p=3 if variant is Variant.RSPP_PL else None)
    cfg = SolverConfig(oracle=OracleConfig(200_000, 2_000_000))
    seen_yes = False
    for t in range(4):
        probe = inst.with_target(t)
        try:
            out = solve(probe, "auto", cfg)
        except BudgetExceeded:
            continue
        assert out.decision or not seen_yes
        seen_yes |= out.decision
        if out.decision:
            assert validate_solution(probe, out.graph).valid
        assert out.decision == (solve_exact(probe, cfg.oracle) is not None)


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_corpus_agreement(path):
    inst = read_instance(path)
    auto = solve(inst)
    try:
        ref = solve(inst, "oracle")
    except BudgetExceeded:
        pytest.skip("oracle over budget on this file")
    assert auto.decision == ref.decision
