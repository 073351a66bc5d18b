"""Plain vs connected-region vs disconnected-region sampling on the built-in fixtures.

    python scripts/connectivity_arms.py --trials 50 --out results/arms
"""
import argparse
import json
import os

from nhplan.bench import PLAIN_NAMES, ExperimentConfig, run_experiment
from nhplan.fixtures import FIXTURES, get_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawTextHelpFormatter)
    ap.add_argument("--planners", default="rrt,rrt_star,bit_star")
    ap.add_argument("--fixtures", default=",".join(FIXTURES))
    ap.add_argument("--hb", type=float, default=0.5)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/arms")
    args = ap.parse_args()

    rows = []
    print(f"{'fixture':<12} {'planner':<7} {'arm':<13} {'iters':>8} {'nodes':>8} {'cost':>8} {'succ':>6}")
    for name in args.fixtures.split(","):
        fx = get_fixture(name)
        for planner in args.planners.split(","):
            for arm, region, hb in (("plain", None, 0.0), ("connected", fx.connected, args.hb),
                                    ("disconnected", fx.disconnected, args.hb)):
                cfg = ExperimentConfig(planner, fx.problem, region, hb, args.trials, args.seed)
                res = run_experiment(cfg, os.path.join(args.out, name, planner, arm), args.workers)
                cost = "-" if res.mean_cost is None else f"{res.mean_cost:.1f}"
                print(f"{name:<12} {PLAIN_NAMES[planner]:<7} {arm:<13} {res.mean_iterations:>8.1f} "
                      f"{res.mean_nodes:>8.1f} {cost:>8} {res.success_rate:>6.0%}")
                rows.append({"fixture": name, "planner": planner, "arm": arm, "h_b": hb,
                             **res.summary()})
    with open(os.path.join(args.out, "summary.json"), "w") as f:
        json.dump(rows, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
