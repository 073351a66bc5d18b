"""Command-line entry point: ``nhplan <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import bench, dataset_gen, fixtures
from .errors import NHPlanError
from .grid_map import load_problem, save_map, save_problem
from .losses import grad_check, loss_report
from .region_graph import DEFAULT_THRESHOLD, read_efld, read_region, write_gradient_efld, write_region


def _size(text: str) -> tuple[int, int]:
    if "x" in text:
        h, w = text.lower().split("x")
        return int(h), int(w)
    return int(text), int(text)


def _biases(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _planner_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--planner", choices=sorted(bench.PLANNERS), default="rrt")
    p.add_argument("--map", help="map PGM")
    p.add_argument("--problem", help="problem JSON")
    p.add_argument("--region", help="promising region PGM (255 = promising)")
    p.add_argument("--fixture", choices=sorted(fixtures.FIXTURES),
                   help="use a built-in fixture instead of --map/--problem")
    p.add_argument("--fixture-region", choices=["connected", "disconnected"],
                   help="use the fixture's own region")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-size", type=float)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--goal-radius", type=float)
    p.add_argument("--rewire-radius", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--sample-limit", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output directory")


def _experiment(args, h_b: float) -> bench.ExperimentConfig:
    overrides = {k: getattr(args, k) for k in
                 ("step_size", "max_iterations", "goal_radius", "rewire_radius", "batch_size",
                  "sample_limit", "time_limit") if getattr(args, k) is not None}
    if args.fixture:
        fx = fixtures.get_fixture(args.fixture)
        problem = fx.problem
        region = getattr(fx, args.fixture_region) if args.fixture_region else None
    else:
        if not (args.map and args.problem):
            raise SystemExit("either --fixture or both --map and --problem are required")
        problem = load_problem(args.map, args.problem)
        region = None
    if args.region:
        region = read_region(args.region)
    return bench.ExperimentConfig(args.planner, problem, region, h_b, args.trials, args.seed,
                                  overrides)


def cmd_plan(args) -> int:
    res = bench.run_experiment(_experiment(args, args.hb), args.out, args.workers)
    print(json.dumps(res.summary(), indent=2))
    return 0


def cmd_sweep(args) -> int:
    cfg = _experiment(args, 0.0)
    table = bench.sweep_bias(cfg, args.biases, args.out, args.workers)
    print(f"{'h_b':>5} {'label':<10} {'iters':>9} {'nodes':>9} {'cost':>9} {'success':>8}")
    for row in table:
        cost = "-" if row["mean_cost"] is None else f"{row['mean_cost']:.1f}"
        print(f"{row['h_b']:>5.2f} {row['label']:<10} {row['mean_iterations']:>9.1f} "
              f"{row['mean_nodes']:>9.1f} {cost:>9} {row['success_rate']:>8.1%}")
    return 0


def cmd_eval(args) -> int:
    report = bench.eval_predictions(args.manifest, args.pred, args.threshold, args.out)
    print(json.dumps(report["groups"], indent=2))
    return 0


def cmd_export_fixtures(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    for name in sorted(fixtures.FIXTURES):
        fx = fixtures.get_fixture(name)
        save_problem(os.path.join(args.out, f"{name}.pgm"),
                     os.path.join(args.out, f"{name}.json"), fx.problem)
        write_region(os.path.join(args.out, f"{name}_connected.pgm"), fx.connected)
        write_region(os.path.join(args.out, f"{name}_disconnected.pgm"), fx.disconnected)
    print(f"wrote {len(fixtures.FIXTURES)} fixtures to {args.out}")
    return 0


def cmd_gen_maps(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    listing = []
    for k, recipe in enumerate(dataset_gen.recipes_for(args.category, args.count, args.size,
                                                       args.seed)):
        grid, report = dataset_gen.gen_map_with_report(recipe)
        name = f"{k:05d}_map.pgm"
        save_map(os.path.join(args.out, name), grid)
        listing.append({"file": name, "category": recipe.category.value,
                        "group": recipe.category.group, "seed": recipe.seed,
                        "size": list(recipe.size), "free_fraction": report.free_fraction,
                        "dead_ends": len(report.dead_ends)})
    with open(os.path.join(args.out, "maps.json"), "w") as f:
        json.dump(listing, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {len(listing)} maps to {args.out}")
    return 0


def cmd_gen_gt(args) -> int:
    if args.map or args.problem:
        if not (args.map and args.problem):
            raise SystemExit("--map and --problem go together")
        problem = load_problem(args.map, args.problem)
        sample = dataset_gen.gen_ground_truth(problem, args.runs, args.stroke, args.seed)
        os.makedirs(args.out, exist_ok=True)
        files = dataset_gen.write_sample(args.out, "sample", sample)
        print(json.dumps(files, indent=2))
        return 0
    recipes = dataset_gen.recipes_for(args.category, args.count, args.size, args.seed)
    manifest = dataset_gen.gen_dataset(recipes, args.problems_per_map, args.out, args.runs,
                                       args.stroke)
    print(f"wrote {len(manifest['samples'])} samples to {args.out}")
    return 0


def cmd_loss(args) -> int:
    if args.grad_check:
        worst = grad_check(np.random.default_rng(args.seed), n_fields=args.fields)
        print(json.dumps({"max_relative_error": worst}, indent=2, sort_keys=True))
        return 0 if max(worst.values()) < 1e-4 else 1
    if not (args.truth and args.region and args.pred):
        raise SystemExit("--truth, --region and --pred are required (or use --grad-check)")
    parts = loss_report(read_efld(args.truth), read_region(args.region), read_efld(args.pred))
    report = {name: out.value for name, out in parts.items()}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    print(text, end="")
    if args.grad_out:
        g = parts["total"]
        write_gradient_efld(args.grad_out, g.grad_x, g.grad_y)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhplan", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def gen_common(p):
        p.add_argument("--category", default="all",
                       choices=["all"] + [c.value for c in dataset_gen.Category])
        p.add_argument("--count", type=int, default=10)
        p.add_argument("--size", type=_size, default=(256, 256), help="N or HxW")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)

    p = sub.add_parser("gen-maps", help="generate random obstacle maps")
    gen_common(p)
    p.set_defaults(func=cmd_gen_maps)

    p = sub.add_parser("gen-gt", help="generate maps, problems and ground-truth regions")
    gen_common(p)
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--stroke", type=int, default=2)
    p.add_argument("--problems-per-map", type=int, default=1)
    p.add_argument("--map", help="ground truth for an existing map (with --problem)")
    p.add_argument("--problem")
    p.set_defaults(func=cmd_gen_gt)

    p = sub.add_parser("loss", help="evaluate the training losses on EFLD files")
    p.add_argument("--truth", help="ground-truth edge labels (EFLD)")
    p.add_argument("--region", help="ground-truth region (PGM)")
    p.add_argument("--pred", help="predicted edge probabilities (EFLD)")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--grad-out", help="write the total-loss gradient as EFLD")
    p.add_argument("--grad-check", action="store_true", help="finite-difference gradient check")
    p.add_argument("--fields", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_loss)

    b = sub.add_parser("bench", help="planner experiments and prediction scoring")
    bsub = b.add_subparsers(dest="bench_command", required=True)
    p = bsub.add_parser("plan", help="repeated trials of one planner")
    _planner_args(p)
    p.add_argument("--hb", type=float, default=0.0, help="heuristic sampling bias")
    p.set_defaults(func=cmd_plan)
    p = bsub.add_parser("sweep", help="repeat an experiment over several biases")
    _planner_args(p)
    p.add_argument("--biases", type=_biases, default=[0.0, 0.3, 0.6, 0.9])
    p.set_defaults(func=cmd_sweep)
    p = bsub.add_parser("eval", help="connectivity and false-negative rates of predictions")
    p.add_argument("--manifest", required=True)
    p.add_argument("--pred", required=True, help="directory of <id>.efld / <id>.npfd files")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)
    p = bsub.add_parser("export-fixtures", help="write the built-in fixtures as PGM/JSON files")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_fixtures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NHPlanError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
