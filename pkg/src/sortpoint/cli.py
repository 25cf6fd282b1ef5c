"""Command-line front end: solve, validate, generate, min-target, bench."""

from __future__ import annotations

import argparse
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .codec import dump_instance, dump_solution, parse_decomposition, parse_instance, parse_solution
from .dispatch import ALGORITHMS, SolverConfig, applicable, min_target, solve
from .errors import BudgetExceeded, InvalidInput, InvalidSourceSolution, InvalidVariant, ParseError, ValidationError
from .instance_model import Variant, validate_solution
from .oracle import OracleConfig, min_target_exact
from .randgen import random_bounded_instance, random_instance
from .reductions import (
    Sat22Formula,
    ThreePartitionInput,
    check_reduction,
    gen_3partition,
    gen_3sat22_rspp_pl,
    gen_3sat22_spp,
    parse_source,
    random_sat22,
    solve_source_problem,
    witness_from_source_solution,
)
from .rspp_colorcoding import ColorCodingConfig
from .twdp import TwdpConfig

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    algorithm: str = "auto"
    coloring: str = "exhaustive"
    seed: int = 0
    trials: int | None = None
    budget: int | None = None
    state_cap: int = 1_000_000
    ram_bound: int | None = None
    inputs: tuple[str, ...] = ()
    output: str | None = None

    def solver(self, decomposition=None) -> SolverConfig:
        oracle = OracleConfig.from_env() if self.budget is None else OracleConfig(max(1, self.budget // 25), self.budget)
        return SolverConfig(
            oracle=oracle,
            coloring=ColorCodingConfig(mode=self.coloring, seed=self.seed, trials=self.trials),
            twdp=TwdpConfig(state_cap=self.state_cap),
            ram_bound=self.ram_bound,
            decomposition=decomposition,
        )

    def provenance(self, algorithm: str) -> dict:
        head = {"generated-by": f"sortpoint {__version__}", "algorithm": algorithm, "seed": self.seed, "coloring": self.coloring}
        if self.trials is not None:
            head["trials"] = self.trials
        if self.budget is not None:
            head["budget"] = self.budget
        if self.ram_bound is not None:
            head["ram-bound"] = self.ram_bound
        return head


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", choices=ALGORITHMS, default="auto")
    p.add_argument("--coloring", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int)
    p.add_argument("--budget", type=int, help="oracle search budget (default: $SORTPOINT_BUDGET or built-in)")
    p.add_argument("--state-cap", type=int, default=1_000_000)
    p.add_argument("--ram-bound", type=int, help="override the pool size used when marking vertices")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sortpoint", description="Minimum sort-point network design solvers.")
    ap.add_argument("--version", action="version", version=f"sortpoint {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", help="decide an instance and write a solution on YES")
    p.add_argument("instance")
    p.add_argument("--out", help="solution file (default: standard output)")
    p.add_argument("--target", type=int, help="override the instance target")
    p.add_argument("--decomposition", help="tree decomposition file (bags and tree edges)")
    _solver_flags(p)

    p = sub.add_parser("validate", help="check a solution against an instance")
    p.add_argument("instance")
    p.add_argument("solution")

    p = sub.add_parser("generate", help="write a reduction or random instance")
    p.add_argument("kind", choices=("random", "bounded", "3partition", "sat22-pl", "sat22-spp"))
    p.add_argument("--source", help="source problem document for reductions")
    p.add_argument("--routed", action="store_true", help="3partition: attach routes")
    p.add_argument("--witness", help="also write the solution built from a source solution")
    p.add_argument("--vars", type=int, help="sat22 without --source: random formula on this many variables")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="RSPP")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--target", type=int, default=1)
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("min-target", help="smallest feasible target")
    p.add_argument("instance")
    _solver_flags(p)

    p = sub.add_parser("bench", help="run solvers over instance files, tab-separated output")
    p.add_argument("paths", nargs="+", help="instance files or directories of *.yaml")
    p.add_argument("--algos", default="auto,oracle", help="comma-separated algorithms")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-time", action="store_true", help="omit wall times (deterministic output)")
    _solver_flags(p)
    return ap


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(ns: argparse.Namespace) -> CliConfig:
    return CliConfig(
        command=ns.command,
        algorithm=getattr(ns, "algo", "auto"),
        coloring=getattr(ns, "coloring", "exhaustive"),
        seed=getattr(ns, "seed", 0),
        trials=getattr(ns, "trials", None),
        budget=getattr(ns, "budget", None),
        state_cap=getattr(ns, "state_cap", 1_000_000),
        ram_bound=getattr(ns, "ram_bound", None),
        output=getattr(ns, "out", None),
    )


def cmd_solve(ns) -> int:
    cfg = _config(ns)
    inst = parse_instance(_read(ns.instance))
    if ns.target is not None:
        inst = inst.with_target(ns.target)
    td = parse_decomposition(_read(ns.decomposition), inst) if ns.decomposition else None
    out = solve(inst, cfg.algorithm, cfg.solver(td))
    algo = out.detail["algorithm"]
    print("YES" if out.decision else "NO")
    if out.decision:
        header = dict(cfg.provenance(algo), instance=Path(ns.instance).name, target=inst.target)
        text = dump_solution(inst, out.graph, header)
        if cfg.output:
            _emit(text, cfg.output)
        else:
            sys.stdout.write(text)
    return EXIT_YES if out.decision else EXIT_NO


def cmd_validate(ns) -> int:
    inst = parse_instance(_read(ns.instance))
    h = parse_solution(_read(ns.solution), inst)
    rep = validate_solution(inst, h)
    if rep.valid:
        print("valid")
        return EXIT_YES
    print("invalid")
    lab = inst.graph.labels
    if not rep.is_subgraph_of_closure:
        print("  edges outside the closure: " + ", ".join(f"{lab[a]}->{lab[b]}" for a, b in rep.foreign_edges))
    if rep.offending_vertices:
        print(f"  outdegree above {inst.target}: " + ", ".join(lab[v] for v in rep.offending_vertices))
    for i in rep.unsatisfied_commodities:
        c = inst.commodities[i]
        print(f"  commodity {i} ({lab[c.source]} -> {lab[c.destination]}) not served")
    return EXIT_NO


def _source_for(ns):
    if ns.source:
        return parse_source(_read(ns.source))
    if ns.kind == "3partition":
        raise UsageError("3partition needs --source")
    if ns.vars is None:
        raise UsageError(f"{ns.kind} needs --source or --vars")
    return random_sat22(ns.vars, random.Random(ns.seed))


def cmd_generate(ns) -> int:
    rng = random.Random(ns.seed)
    header = {"generated-by": f"sortpoint {__version__}", "kind": ns.kind, "seed": ns.seed}
    if ns.kind == "random":
        p = ns.p if ns.variant == "RSPP_PL" else None
        inst = random_instance(rng, Variant(ns.variant), ns.n, ns.k, ns.target, ns.density, p)
        header.update(variant=ns.variant, n=ns.n, k=ns.k, density=ns.density)
        _emit(dump_instance(inst, header), ns.out)
        return EXIT_YES
    if ns.kind == "bounded":
        inst = random_bounded_instance(rng, Variant(ns.variant), ns.n, ns.k, ns.target, ns.p)
        header.update(variant=ns.variant, n=ns.n, k=ns.k, p=ns.p)
        _emit(dump_instance(inst, header), ns.out)
        return EXIT_YES
    source = _source_for(ns)
    if ns.kind == "3partition":
        if not isinstance(source, ThreePartitionInput):
            raise UsageError("source is not a 3partition document")
        inst = gen_3partition(source, routed=ns.routed)
    else:
        if not isinstance(source, Sat22Formula):
            raise UsageError("source is not a sat22 document")
        inst = (gen_3sat22_rspp_pl if ns.kind == "sat22-pl" else gen_3sat22_spp)(source)
    rep = check_reduction(inst, source)
    header["structural-checks"] = "pass" if rep.passed else "FAIL " + ",".join(k for k, v in rep.checks.items() if not v)
    for name, flag in sorted(rep.flags.items()):
        header[f"flag {name}"] = flag
    _emit(dump_instance(inst, header), ns.out)
    if ns.witness:
        sol = solve_source_problem(source)
        if sol is None:
            print("source problem has no solution; no witness written", file=sys.stderr)
            return EXIT_NO
        h = witness_from_source_solution(inst, source, sol)
        _emit(dump_solution(inst, h, {"generated-by": f"sortpoint {__version__}", "witness-for": ns.kind}), ns.witness)
    return EXIT_YES


def cmd_min_target(ns) -> int:
    cfg = _config(ns)
    inst = parse_instance(_read(ns.instance))
    if cfg.algorithm == "oracle":
        value = min_target_exact(inst.graph, inst.commodities, inst.variant, inst.path_length, cfg.solver().oracle)
    else:
        value = min_target(inst, cfg.algorithm, cfg.solver())
    print("none" if value is None else value)
    return EXIT_YES if value is not None else EXIT_NO


def _collect(paths) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(sorted(p.glob("*.yaml")))
        elif p.exists():
            files.append(p)
        else:
            raise UsageError(f"no such file or directory: {raw}")
    return files


def _bench_one(job):
    path, algo, cfg = job
    inst = parse_instance(path.read_text(encoding="utf-8"))
    if not applicable(inst, algo):
        return (path.name, algo, "n/a", inst.target, 0.0)
    start = time.perf_counter()
    try:
        out = solve(inst, algo, cfg)
        decision = "YES" if out.decision else "NO"
    except BudgetExceeded:
        decision = "BUDGET"
    return (path.name, algo, decision, inst.target, time.perf_counter() - start)


def cmd_bench(ns) -> int:
    cfg = _config(ns)
    algos = [a.strip() for a in ns.algos.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad:
        raise UsageError(f"unknown algorithms: {', '.join(bad)}")
    solver = cfg.solver()
    jobs = [(f, a, solver) for f in _collect(ns.paths) for a in algos]
    if ns.workers > 1:
        with ProcessPoolExecutor(ns.workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    cols = ["instance", "algo", "decision", "target"] + ([] if ns.no_time else ["seconds"])
    print("\t".join(cols))
    for name, algo, decision, target, secs in rows:
        cells = [name, algo, decision, str(target)] + ([] if ns.no_time else [f"{secs:.4f}"])
        print("\t".join(cells))
    return EXIT_BUDGET if any(r[2] == "BUDGET" for r in rows) else EXIT_YES


COMMANDS = {"solve": cmd_solve, "validate": cmd_validate, "generate": cmd_generate, "min-target": cmd_min_target, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if not ns.command:
            raise UsageError("a command is required (solve, validate, generate, min-target, bench)")
        return COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"sortpoint: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"sortpoint: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, InvalidVariant, InvalidInput, InvalidSourceSolution) as exc:
        print(f"sortpoint: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"sortpoint: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
