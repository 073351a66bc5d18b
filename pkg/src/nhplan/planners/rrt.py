"""RRT and RRT* with a pluggable (optionally region-biased) sampler."""
from __future__ import annotations

import math
import random
from typing import Optional

from ..grid_map import PlanningProblem, free_edge, free_state, path_cost
from ..heuristic import HeuristicSampler
from .common import (PlannerConfig, PlannerResult, default_sampler, finish_path, goal_radius,
                     in_goal, steer, success_result)
from .tree import Tree


def _draw_free(tree: Tree, grid, sampler, rng, step, max_retries):
    """Sample, find the nearest vertex and steer until the new state is free.

    Returns (nearest, new_state) or None when every retry landed in an obstacle
    or reproduced an existing vertex.
    """
    for _ in range(max_retries):
        x_rand = sampler.sample(rng)
        near = tree.nearest(x_rand[0], x_rand[1])
        nx, ny = tree.xs[near], tree.ys[near]
        x_new = steer(nx, ny, x_rand[0], x_rand[1], step, grid)
        if free_state(grid, x_new) and (x_new[0] != nx or x_new[1] != ny):
            return near, x_new
    return None


def rrt_plan(problem: PlanningProblem, config: PlannerConfig,
             sampler: Optional[HeuristicSampler] = None) -> PlannerResult:
    grid = problem.map
    sampler = default_sampler(grid, sampler)
    rng = random.Random(config.seed)
    r_goal = goal_radius(problem, config)
    goal = problem.goal
    tree = Tree(problem.start, config.step_size, grid.width, grid.height)
    if in_goal(problem.start, goal, r_goal):
        return success_result(grid, tree, 0, goal, 0)

    for it in range(1, config.max_iterations + 1):
        drawn = _draw_free(tree, grid, sampler, rng, config.step_size, config.max_retries)
        if drawn is None:
            continue
        near, x_new = drawn
        if not free_edge(grid, tree.state(near), x_new):
            continue
        c = tree.cost[near] + math.hypot(x_new[0] - tree.xs[near], x_new[1] - tree.ys[near])
        v = tree.add(x_new, near, c)
        if in_goal(x_new, goal, r_goal):
            return success_result(grid, tree, v, goal, it)
    return PlannerResult(False, config.max_iterations, len(tree), tree=tree)


def rrt_star_plan(problem: PlanningProblem, config: PlannerConfig,
                  sampler: Optional[HeuristicSampler] = None) -> PlannerResult:
    grid = problem.map
    sampler = default_sampler(grid, sampler)
    rng = random.Random(config.seed)
    r_goal = goal_radius(problem, config)
    goal = problem.goal
    radius = config.rewire_radius
    tree = Tree(problem.start, config.step_size, grid.width, grid.height)
    if in_goal(problem.start, goal, r_goal):
        return success_result(grid, tree, 0, goal, 0)

    xs, ys, cost = tree.xs, tree.ys, tree.cost
    goal_vertices: list[int] = []
    tails: dict[int, float] = {}  # goal vertex -> length of the final hop to the exact goal
    history: list[float] = []

    for it in range(1, config.max_iterations + 1):
        drawn = _draw_free(tree, grid, sampler, rng, config.step_size, config.max_retries)
        if drawn is not None:
            near, x_new = drawn
            nx, ny = x_new
            neighbours = tree.near(nx, ny, radius)
            # choose parent: cheapest collision-free neighbour, nearest if none in range
            candidates = neighbours if neighbours else [near]
            parent, parent_cost = -1, math.inf
            for u in candidates:
                c = cost[u] + math.hypot(nx - xs[u], ny - ys[u])
                if c < parent_cost and free_edge(grid, tree.state(u), x_new):
                    parent, parent_cost = u, c
            if parent >= 0:
                v = tree.add(x_new, parent, parent_cost)
                for u in neighbours:
                    if u == parent:
                        continue
                    c = parent_cost + math.hypot(xs[u] - nx, ys[u] - ny)
                    if c < cost[u] and free_edge(grid, x_new, tree.state(u)):
                        tree.reparent(u, v)
                if config.debug:
                    audit_costs(tree)
                if in_goal(x_new, goal, r_goal):
                    if not config.refine:
                        return success_result(grid, tree, v, goal, it)
                    goal_vertices.append(v)
                    tails[v] = _tail(grid, x_new, goal)
        if config.refine:
            history.append(min((cost[g] + tails[g] for g in goal_vertices), default=math.inf))

    if config.refine and goal_vertices:
        g = min(goal_vertices, key=lambda u: (cost[u] + tails[u], u))
        path = finish_path(grid, tree, g, goal)
        return PlannerResult(True, config.max_iterations, len(tree), path_cost(path), path,
                             cost_history=history, tree=tree)
    return PlannerResult(False, config.max_iterations, len(tree),
                         cost_history=history if config.refine else None, tree=tree)


def _tail(grid, s, goal) -> float:
    if s == goal or not free_edge(grid, s, goal):
        return 0.0
    return math.hypot(goal[0] - s[0], goal[1] - s[1])


def audit_costs(tree: Tree, tol: float = 1e-9) -> None:
    for u, v in tree.edges():
        expect = tree.cost[u] + math.hypot(tree.xs[v] - tree.xs[u], tree.ys[v] - tree.ys[u])
        if abs(tree.cost[v] - expect) > tol:
            raise AssertionError(f"cost-to-come of vertex {v} is {tree.cost[v]}, expected {expect}")
