"""Random differential sweep: one solver against the exhaustive oracle.

    python3 scripts/sweep.py --algo rspp-colorcode --variant RSPP --count 500 --n 6 --k 3 --target 2
"""

import argparse
import random
import sys
import time

from sortpoint.dispatch import ALGORITHMS, SolverConfig, applicable, solve
from sortpoint.errors import BudgetExceeded
from sortpoint.instance_model import Variant, validate_solution
from sortpoint.oracle import solve_exact
from sortpoint.randgen import random_instance


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--algo", choices=ALGORITHMS, default="auto")
    ap.add_argument("--variant", choices=[v.value for v in Variant], default="RSPP")
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--n", type=int, default=6, help="largest vertex count")
    ap.add_argument("--k", type=int, default=3, help="largest commodity count")
    ap.add_argument("--target", type=int, default=2)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--density", type=float, default=0.35)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    variant = Variant(args.variant)
    cfg = SolverConfig()
    stats = {"agree": 0, "mismatch": 0, "budget": 0, "skipped": 0}
    start = time.perf_counter()
    for i in range(args.count):
        p = args.p if variant is Variant.RSPP_PL else None
        inst = random_instance(rng, variant, rng.randint(1, args.n), rng.randint(0, args.k), args.target, args.density, p)
        if not applicable(inst, args.algo):
            stats["skipped"] += 1
            continue
        try:
            got = solve(inst, args.algo, cfg)
            want = solve_exact(inst, cfg.oracle) is not None
        except BudgetExceeded:
            stats["budget"] += 1
            continue
        if got.decision != want or (got.decision and not validate_solution(inst, got.graph).valid):
            stats["mismatch"] += 1
            print(f"mismatch at draw {i}: solver {got.decision}, oracle {want}\n{inst!r}", file=sys.stderr)
        else:
            stats["agree"] += 1
    print(" ".join(f"{k}={v}" for k, v in stats.items()), f"seconds={time.perf_counter() - start:.1f}")
    return 1 if stats["mismatch"] else 0


if __name__ == "__main__":
    sys.exit(main())
