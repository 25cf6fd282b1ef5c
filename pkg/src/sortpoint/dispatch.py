"""One entry point over all solvers, with automatic selection."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import BudgetExceeded, InvalidVariant
from .instance_model import Instance, SolveOutcome, Variant, validate_solution
from .oracle import OracleConfig, observation_bound, solve_exact
from .rspp_colorcoding import ColorCodingConfig, solve_rspp_by_commodities
from .rspp_t1 import solve_rspp_target1
from .spp_commodities import SppConfig, solve_spp_by_commodities
from .treedec import NiceTreeDecomposition
from .twdp import TwdpConfig, solve_twdp

ALGORITHMS = ("auto", "oracle", "t1", "spp-kernel", "spp-ramsey", "rspp-colorcode", "twdp")


@dataclass(frozen=True)
class SolverConfig:
    oracle: OracleConfig = field(default_factory=OracleConfig.from_env)
    coloring: ColorCodingConfig = field(default_factory=ColorCodingConfig)
    twdp: TwdpConfig = field(default_factory=TwdpConfig)
    ram_bound: int | None = None
    smd_method: str = "auto"
    decomposition: NiceTreeDecomposition | None = None

    def spp(self) -> SppConfig:
        kw = {"oracle": self.oracle, "smd_method": self.smd_method}
        if self.ram_bound is not None:
            bound = self.ram_bound
            kw["ram_bound"] = lambda r, s: bound
        return SppConfig(**kw)


def choose_algorithm(instance: Instance, cfg: SolverConfig | None = None) -> str:
    cfg = cfg or SolverConfig()
    v = instance.variant
    if instance.target <= 1 and v is Variant.RSPP:
        return "t1"
    if instance.target <= 1 and v is Variant.SPP:
        return "spp-kernel"
    if v is Variant.RSPP_PL or (v is Variant.SPP and cfg.decomposition is not None):
        return "twdp"
    return "rspp-colorcode" if v is Variant.RSPP else "spp-ramsey"


def applicable(instance: Instance, algo: str) -> bool:
    v, T = instance.variant, instance.target
    return {
        "auto": True,
        "oracle": True,
        "t1": v is Variant.RSPP and T <= 1,
        "spp-kernel": v is Variant.SPP and T <= 1,
        "spp-ramsey": v is Variant.SPP,
        "rspp-colorcode": v is Variant.RSPP,
        "twdp": v in (Variant.SPP, Variant.RSPP_PL),
    }[algo]


def _oracle(instance: Instance, cfg: SolverConfig) -> SolveOutcome:
    cover = solve_exact(instance, cfg.oracle)
    if cover is None:
        return SolveOutcome(False, None, {"path": "oracle"})
    return SolveOutcome(True, cover.union_graph(instance.graph), {"path": "oracle"})


def _run(instance: Instance, algo: str, cfg: SolverConfig) -> SolveOutcome:
    if not applicable(instance, algo):
        raise InvalidVariant(f"{algo} does not apply to {instance.variant} with target {instance.target}")
    if algo == "oracle":
        return _oracle(instance, cfg)
    if algo == "t1":
        h = solve_rspp_target1(instance)
        return SolveOutcome(h is not None, h, {"path": "t1"})
    if algo in ("spp-kernel", "spp-ramsey"):
        return solve_spp_by_commodities(instance, cfg.spp())
    if algo == "rspp-colorcode":
        return solve_rspp_by_commodities(instance, cfg.coloring)
    return solve_twdp(instance, cfg.decomposition, None, cfg.twdp)


def solve(instance: Instance, algo: str = "auto", cfg: SolverConfig | None = None) -> SolveOutcome:
    """Decide the instance; YES outcomes carry a validated solution graph."""
    cfg = cfg or SolverConfig()
    chosen = choose_algorithm(instance, cfg) if algo == "auto" else algo
    start = time.perf_counter()
    try:
        out = _run(instance, chosen, cfg)
    except BudgetExceeded:
        # automatic selection falls back to the oracle, which is budgeted itself
        if algo != "auto" or chosen == "oracle":
            raise
        chosen = "oracle"
        out = _oracle(instance, cfg)
    if out.decision and not validate_solution(instance, out.graph).valid:
        raise RuntimeError(f"{chosen} returned an invalid solution")
    detail = dict(out.detail, algorithm=chosen, seconds=time.perf_counter() - start)
    return SolveOutcome(out.decision, out.graph, detail)


def min_target(instance: Instance, algo: str = "auto", cfg: SolverConfig | None = None) -> int | None:
    """Smallest target the solver accepts, scanning up to the trivial bound.

    Targets the chosen solver does not handle fall back to automatic selection.
    """
    cfg = cfg or SolverConfig()
    for t in range(observation_bound(instance) + 1):
        probe = instance.with_target(t)
        if solve(probe, algo if applicable(probe, algo) else "auto", cfg).decision:
            return t
    return None
