"""Mean iterations, nodes and success as the heuristic bias grows.

    python scripts/bias_sweep.py --fixture two-passage --planner rrt --out results/sweep
"""
import argparse
import os

from nhplan.bench import ExperimentConfig, sweep_bias
from nhplan.fixtures import FIXTURES, get_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawTextHelpFormatter)
    ap.add_argument("--fixture", default="two-passage", choices=sorted(FIXTURES))
    ap.add_argument("--region", default="connected", choices=["connected", "disconnected"])
    ap.add_argument("--planner", default="rrt", choices=["rrt", "rrt_star", "bit_star"])
    ap.add_argument("--biases", default="0,0.1,0.3,0.5,0.7,0.9")
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/sweep")
    args = ap.parse_args()

    fx = get_fixture(args.fixture)
    cfg = ExperimentConfig(args.planner, fx.problem, getattr(fx, args.region), 0.0, args.trials,
                           args.seed)
    biases = [float(b) for b in args.biases.split(",")]
    table = sweep_bias(cfg, biases, os.path.join(args.out, args.fixture, args.planner), args.workers)
    print(f"{'h_b':>5} {'iters':>9} {'nodes':>9} {'cost':>9} {'succ':>6}")
    for row in table:
        cost = "-" if row["mean_cost"] is None else f"{row['mean_cost']:.1f}"
        print(f"{row['h_b']:>5.2f} {row['mean_iterations']:>9.1f} {row['mean_nodes']:>9.1f} "
              f"{cost:>9} {row['success_rate']:>6.0%}")


if __name__ == "__main__":
    main()
