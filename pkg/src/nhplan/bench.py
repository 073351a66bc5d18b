"""Experiment harness: repeated seeded trials, bias sweeps and prediction scoring."""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, DimensionMismatch, MissingPrediction
from .grid_map import PlanningProblem, load_problem
from .heuristic import build_sampler
from .planners import PLANNERS, PlannerConfig
from .region_graph import (DEFAULT_THRESHOLD, RegionMask, decode_region, decode_region_nodepair,
                           false_negative_rate, is_connected, read_efld, read_nodepair,
                           read_region)

CSV_COLUMNS = ["trial", "success", "iterations", "nodes", "cost"]
PLAIN_NAMES = {"rrt": "RRT", "rrt_star": "RRT*", "bit_star": "BIT*"}


@dataclass
class ExperimentConfig:
    planner: str
    problem: PlanningProblem
    region: Optional[RegionMask] = None
    h_b: float = 0.0
    trials: int = 50
    seed: int = 0
    overrides: dict = field(default_factory=dict)  # extra PlannerConfig fields

    def __post_init__(self):
        if self.planner not in PLANNERS:
            raise ConfigError(f"unknown planner {self.planner!r}; choose from {sorted(PLANNERS)}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0.0 <= self.h_b <= 1.0:
            raise ConfigError(f"h_b must be in [0, 1], got {self.h_b}")
        if self.h_b > 0 and self.region is None:
            raise ConfigError("a heuristic bias > 0 needs a region")
        bad = set(self.overrides) - set(PlannerConfig.__dataclass_fields__) - {"seed"}
        if bad:
            raise ConfigError(f"unknown planner settings: {sorted(bad)}")
        grid = self.problem.map
        if self.region is not None and self.region.shape != (grid.height, grid.width):
            raise DimensionMismatch(f"region {self.region.shape} vs map {(grid.height, grid.width)}")

    @classmethod
    def from_files(cls, planner, map_file, problem_file, region_file=None, **kw):
        problem = load_problem(map_file, problem_file)
        region = read_region(region_file) if region_file else None
        return cls(planner, problem, region, **kw)

    def planner_config(self, trial: int) -> PlannerConfig:
        settings = {k: v for k, v in self.overrides.items() if k != "seed"}
        return PlannerConfig(**{**settings, "heuristic_bias": self.h_b, "seed": self.seed + trial})

    def describe(self) -> dict:
        base = asdict(self.planner_config(0))
        base.pop("seed")
        return {"planner": self.planner, "h_b": self.h_b, "trials": self.trials,
                "seed": self.seed, "heuristic": self.region is not None, "planner_config": base}


@dataclass
class TrialRow:
    trial: int
    success: bool
    iterations: int
    nodes: int
    cost: Optional[float]


@dataclass
class AggregateResult:
    mean_iterations: float
    mean_nodes: float
    mean_cost: Optional[float]  # over successful trials only
    success_rate: float
    rows: list[TrialRow]

    def summary(self) -> dict:
        return {"mean_iterations": self.mean_iterations, "mean_nodes": self.mean_nodes,
                "mean_cost": self.mean_cost, "success_rate": self.success_rate,
                "mean_cost_population": "successful trials only"}


def _run_trial(config: ExperimentConfig, trial: int) -> TrialRow:
    plan = PLANNERS[config.planner]
    # h_b = 0 replays the plain planner: the sampler draws the same random stream
    region = config.region.mask if config.region is not None else _empty(config.problem)
    sampler = build_sampler(region, config.h_b)
    r = plan(config.problem, config.planner_config(trial), sampler)
    return TrialRow(trial, r.success, r.iterations, r.node_count, r.cost if r.success else None)


def _empty(problem: PlanningProblem) -> np.ndarray:
    return np.zeros((problem.map.height, problem.map.width), dtype=bool)


def aggregate(rows: list[TrialRow]) -> AggregateResult:
    n = len(rows)
    costs = [r.cost for r in rows if r.success]
    return AggregateResult(
        mean_iterations=sum(r.iterations for r in rows) / n,
        mean_nodes=sum(r.nodes for r in rows) / n,
        mean_cost=sum(costs) / len(costs) if costs else None,
        success_rate=len(costs) / n,
        rows=rows,
    )


def rows_to_csv(rows: list[TrialRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.trial, int(r.success), r.iterations, r.nodes,
                    "" if r.cost is None else repr(r.cost)])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[TrialRow]:
    reader = csv.DictReader(io.StringIO(text))
    return [TrialRow(int(d["trial"]), d["success"] == "1", int(d["iterations"]), int(d["nodes"]),
                     float(d["cost"]) if d["cost"] else None) for d in reader]


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def run_experiment(config: ExperimentConfig, out_dir=None, workers: int = 1) -> AggregateResult:
    """Run ``config.trials`` trials with seeds ``seed + trial``; optionally write CSV/JSON."""
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_run_trial, [config] * config.trials, range(config.trials)))
    else:
        rows = [_run_trial(config, t) for t in range(config.trials)]
    result = aggregate(rows)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "trials.csv"), "w", newline="") as f:
            f.write(rows_to_csv(rows))
        with open(os.path.join(out_dir, "aggregate.json"), "w") as f:
            f.write(_dump_json({**config.describe(), **result.summary()}))
    return result


def bias_label(planner: str, h_b: float) -> str:
    name = PLAIN_NAMES[planner]
    return name if h_b == 0 else f"NH-{name}"


def sweep_bias(config: ExperimentConfig, biases, out_dir=None, workers: int = 1) -> list[dict]:
    table = []
    for b in biases:
        cfg = ExperimentConfig(config.planner, config.problem, config.region, float(b),
                               config.trials, config.seed, dict(config.overrides))
        sub = None if out_dir is None else os.path.join(out_dir, f"hb_{b:g}")
        res = run_experiment(cfg, sub, workers)
        table.append({"h_b": float(b), "label": bias_label(config.planner, float(b)),
                      **res.summary(), "result": res})
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        rows = [{k: v for k, v in t.items() if k != "result"} for t in table]
        with open(os.path.join(out_dir, "sweep.json"), "w") as f:
            f.write(_dump_json({**config.describe(), "rows": rows}))
    return table


# --- prediction scoring ---------------------------------------------------------------


def _find_prediction(pred_dir, sample_id: str):
    for ext in ("efld", "npfd"):
        path = os.path.join(pred_dir, f"{sample_id}.{ext}")
        if os.path.exists(path):
            return ext, path
    raise MissingPrediction(f"no {sample_id}.efld or {sample_id}.npfd in {pred_dir}")


def eval_predictions(manifest_path, pred_dir, threshold: float = DEFAULT_THRESHOLD,
                     out_file=None) -> dict:
    """Connectivity rate and mean false-negative rate per manifest group.

    Edge-field predictions are scored against the ground-truth edge labels
    decoded with the same threshold; node-pair predictions against the
    ground-truth node region.
    """
    with open(manifest_path) as f:
        manifest = json.load(f)
    base = os.path.dirname(os.path.abspath(manifest_path))
    per_sample = []
    for entry in manifest["samples"]:
        files = entry["files"]
        problem = load_problem(os.path.join(base, files["map"]), os.path.join(base, files["problem"]))
        kind, path = _find_prediction(pred_dir, entry["id"])
        if kind == "efld":
            pred = decode_region(read_efld(path), threshold)
            truth = decode_region(read_efld(os.path.join(base, files["edges"])), threshold)
        else:
            pred = decode_region_nodepair(read_nodepair(path))
            truth = read_region(os.path.join(base, files["region"]))
        per_sample.append({
            "id": entry["id"], "group": entry.get("group", "all"), "format": kind,
            "connected": is_connected(pred, problem),
            "false_negative_rate": false_negative_rate(pred, truth),
        })
    report = {"threshold": threshold, "samples": per_sample, "groups": {}}
    groups = sorted({s["group"] for s in per_sample})
    for name in groups + ["all"]:
        sel = [s for s in per_sample if name == "all" or s["group"] == name]
        if not sel:
            continue
        report["groups"][name] = {
            "count": len(sel),
            "connectivity_rate": sum(s["connected"] for s in sel) / len(sel),
            "false_negative_rate": sum(s["false_negative_rate"] for s in sel) / len(sel),
        }
    if out_file is not None:
        with open(out_file, "w") as f:
            f.write(_dump_json(report))
    return report
