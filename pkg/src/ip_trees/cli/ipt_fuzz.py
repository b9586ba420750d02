"""
Build seeded trees of every model and run the IP checks on each.
"""
import argparse

from ip_trees.ipt_build import Model, build_coupled, build_model
from ip_trees.ipt_equiv import ms_equivalent
from ip_trees.ipt_errors import IpTreeError
from ip_trees.ipt_measure import FadMeasure1D
from ip_trees.ipt_tree import is_ip_tree

MODELS = (
    ("brownian", Model.brownian()),
    ("alpha_theta(0.3,1)", Model.alpha_theta(0.3, 1.0)),
    ("fat_cantor(3)", Model.fat_cantor(3)),
    ("custom(halves)", Model.custom([FadMeasure1D.build([(0.0, 0.5), (0.5, 0.5)])])),
)


def main(argv=None):
    parser = argparse.ArgumentParser(description="Seeded IP tree fuzz loop")
    parser.add_argument("--rounds", type=int, default=3)
    parser.add_argument("--steps", type=int, default=25)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    failures = 0
    for k in range(args.rounds):
        seed = args.seed + k
        for name, model in MODELS:
            try:
                tree = build_model(model, args.steps, seed, truncation=16)
                ok, violations = is_ip_tree(tree)
                if ok:
                    print(f"[OK] {name} seed={seed} -> atoms={len(tree.weight.atoms)} arcs={len(tree.arcs)}")
                else:
                    failures += 1
                    print(f"[FAIL] {name} seed={seed} -> {violations[0].describe()}")
            except IpTreeError as exc:
                failures += 1
                print(f"[FAIL] {name} seed={seed} -> {exc}")
        try:
            crt, ip = build_coupled(min(args.steps, 8), seed, truncation=16)
            status = "OK" if ms_equivalent(crt, ip) and is_ip_tree(ip)[0] else "FAIL"
        except IpTreeError as exc:
            status = f"FAIL ({exc})"
        if status != "OK":
            failures += 1
        print(f"[{status}] coupled seed={seed}")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
