"""Generate a ground-truth dataset, then score oracle and ablated predictions against it.

The oracle prediction is the ground-truth edge field itself; the ablated one
zeroes a row or column of the region between start and goal. Both are
written as EFLD files so ``nhplan bench eval`` can score them.

    python scripts/make_dataset.py --count 20 --size 128 --out results/dataset
"""
import argparse
import json
import os

import numpy as np

from nhplan.bench import eval_predictions
from nhplan.dataset_gen import gen_dataset, recipes_for
from nhplan.grid_map import load_problem
from nhplan.region_graph import RegionMask, node_to_edge_labels, read_efld, read_region, write_efld


def ablate(region, problem):
    grid = problem.map
    (rs, cs), (rg, cg) = grid.cell_of(problem.start), grid.cell_of(problem.goal)
    m = region.mask.copy()
    if abs(cs - cg) >= 2:
        m[:, (cs + cg) // 2] = False
    else:
        m[(rs + rg) // 2, :] = False
    return RegionMask(m)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawTextHelpFormatter)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--runs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/dataset")
    args = ap.parse_args()

    data = os.path.join(args.out, "data")
    manifest = gen_dataset(recipes_for("all", args.count, (args.size, args.size), args.seed), 1,
                           data, runs=args.runs)
    for kind in ("oracle", "ablated"):
        os.makedirs(os.path.join(args.out, kind), exist_ok=True)
    for entry in manifest["samples"]:
        f = {k: os.path.join(data, v) for k, v in entry["files"].items()}
        edges = read_efld(f["edges"])
        write_efld(os.path.join(args.out, "oracle", f"{entry['id']}.efld"), edges)
        cut = ablate(read_region(f["region"]), load_problem(f["map"], f["problem"]))
        write_efld(os.path.join(args.out, "ablated", f"{entry['id']}.efld"), node_to_edge_labels(cut))
    for kind in ("oracle", "ablated"):
        rep = eval_predictions(os.path.join(data, "manifest.json"), os.path.join(args.out, kind),
                               out_file=os.path.join(args.out, f"eval_{kind}.json"))
        print(kind, json.dumps(rep["groups"], sort_keys=True))
    sizes = [read_region(os.path.join(data, e["files"]["region"])).mask.sum()
             for e in manifest["samples"]]
    print(f"mean region size {np.mean(sizes):.0f} cells")


if __name__ == "__main__":
    main()
