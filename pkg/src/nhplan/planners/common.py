from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ConfigError
from ..grid_map import GridMap, PlanningProblem, State, dist, free_edge, path_cost
from ..heuristic import HeuristicSampler, uniform_sampler
from .tree import Tree


@dataclass(frozen=True)
class PlannerConfig:
    step_size: float = 10.0
    max_iterations: int = 5000
    goal_radius: Optional[float] = None  # None: take the problem's radius
    rewire_radius: float = 20.0
    batch_size: int = 30
    sample_limit: int = 1000
    heuristic_bias: float = 0.0
    seed: int = 0
    refine: bool = False  # RRT*: keep improving until max_iterations
    time_limit: Optional[float] = None  # BIT* wall-clock cap in seconds
    bit_radius: Optional[float] = None  # BIT*: None = RGG radius from free area
    max_retries: int = 10_000  # sample/steer attempts per pass before giving up on it
    debug: bool = False  # RRT*: audit cost-to-come after every rewire

    def __post_init__(self):
        if not self.step_size > 0:
            raise ConfigError(f"step_size must be > 0, got {self.step_size}")
        if self.max_iterations <= 0:
            raise ConfigError(f"max_iterations must be > 0, got {self.max_iterations}")
        if self.batch_size <= 0:
            raise ConfigError(f"batch_size must be > 0, got {self.batch_size}")
        if not 0.0 <= self.heuristic_bias <= 1.0:
            raise ConfigError(f"heuristic_bias must be in [0, 1], got {self.heuristic_bias}")
        if self.goal_radius is not None and not self.goal_radius > 0:
            raise ConfigError(f"goal_radius must be > 0, got {self.goal_radius}")


@dataclass
class PlannerResult:
    success: bool
    iterations: int
    node_count: int
    cost: Optional[float] = None
    path: Optional[list[State]] = None
    cost_history: Optional[list[float]] = None
    tree: Optional[Tree] = field(default=None, compare=False, repr=False)


def goal_radius(problem: PlanningProblem, config: PlannerConfig) -> float:
    return config.goal_radius if config.goal_radius is not None else problem.goal_radius


def default_sampler(grid: GridMap, sampler: Optional[HeuristicSampler]) -> HeuristicSampler:
    if sampler is None:
        return uniform_sampler(grid.width, grid.height)
    if (sampler.height, sampler.width) != (grid.height, grid.width):
        raise ConfigError("sampler region does not match the map dimensions")
    return sampler


def steer(x0: float, y0: float, x1: float, y1: float, step: float, grid: GridMap) -> State:
    d = math.hypot(x1 - x0, y1 - y0)
    if d <= step:
        return State(x1, y1)
    f = step / d
    x = x0 + f * (x1 - x0)
    y = y0 + f * (y1 - y0)
    # convex combination of in-bounds points; guard against rounding onto the far edge
    x = min(max(x, 0.0), math.nextafter(float(grid.width), 0.0))
    y = min(max(y, 0.0), math.nextafter(float(grid.height), 0.0))
    return State(x, y)


def finish_path(grid: GridMap, tree: Tree, v: int, goal: State) -> list[State]:
    """Root-to-``v`` path, extended to the exact goal when that last edge is free."""
    path = tree.path_to(v)
    if path[-1] != goal and free_edge(grid, path[-1], goal):
        path.append(goal)
    return path


def success_result(grid: GridMap, tree: Tree, v: int, goal: State, iterations: int,
                   **extra) -> PlannerResult:
    path = finish_path(grid, tree, v, goal)
    return PlannerResult(True, iterations, len(tree), path_cost(path), path, tree=tree, **extra)


def in_goal(s, goal: State, radius: float) -> bool:
    return dist(s, goal) <= radius
