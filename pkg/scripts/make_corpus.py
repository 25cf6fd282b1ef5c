"""Regenerate the seeded part of corpus/ (the hand-written files are left alone)."""

import argparse
import random
from pathlib import Path

from sortpoint.codec import dump_instance
from sortpoint.instance_model import Variant
from sortpoint.randgen import random_bounded_instance, random_instance
from sortpoint.reductions import ThreePartitionInput, gen_3partition, gen_3sat22_rspp_pl, gen_3sat22_spp, sample_formula

SPECS = [
    # name, variant, n, k, target, density
    ("rand_rspp_a", Variant.RSPP, 5, 3, 1, 0.35),
    ("rand_rspp_b", Variant.RSPP, 6, 3, 2, 0.3),
    ("rand_rspp_c", Variant.RSPP, 6, 2, 2, 0.25),
    ("rand_rspp_d", Variant.RSPP, 5, 4, 1, 0.4),
    ("rand_spp_a", Variant.SPP, 6, 3, 1, 0.35),
    ("rand_spp_b", Variant.SPP, 6, 3, 2, 0.35),
    ("rand_spp_c", Variant.SPP, 7, 4, 1, 0.3),
    ("rand_spp_d", Variant.SPP, 5, 2, 0, 0.4),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="corpus")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    rng = random.Random(args.seed)
    for name, variant, n, k, target, density in SPECS:
        inst = random_instance(rng, variant, n, k, target, density)
        (out / f"{name}.yaml").write_text(dump_instance(inst, {"seeded": f"{name} seed {args.seed}"}))
    for i, (variant, target) in enumerate([(Variant.RSPP_PL, 1), (Variant.RSPP_PL, 2), (Variant.SPP, 1), (Variant.SPP, 2)]):
        inst = random_bounded_instance(rng, variant, 8, 4, target, 3)
        (out / f"bounded_{variant.value.lower()}_{i}.yaml").write_text(dump_instance(inst, {"seeded": f"bounded seed {args.seed}"}))
    micro = ThreePartitionInput(1, 3, (1, 1, 1), strict=False)
    (out / "3partition_micro.yaml").write_text(dump_instance(gen_3partition(micro), {"source": "3partition m=1 B=3 ints=1,1,1 (relaxed)"}))
    (out / "3partition_micro_routed.yaml").write_text(dump_instance(gen_3partition(micro, routed=True), {"source": "3partition m=1 B=3 ints=1,1,1 (relaxed)"}))
    f = sample_formula()
    (out / "sat22_sample_pl.yaml").write_text(dump_instance(gen_3sat22_rspp_pl(f), {"source": "sat22 sample formula"}))
    (out / "sat22_sample_spp.yaml").write_text(dump_instance(gen_3sat22_spp(f), {"source": "sat22 sample formula"}))


if __name__ == "__main__":
    main()
