"""Batch Informed Trees, run until the first solution.

Samples arrive in batches through the same sampler as RRT, so region-biased
sampling carries over unchanged. Edges are ordered by their estimated
solution cost ``g(v) + |v - x| + |x - goal|`` and collision-checked only
when popped.
"""
from __future__ import annotations

import heapq
import math
import random
import time
from typing import Optional

import numpy as np

from ..grid_map import PlanningProblem, free_edge, free_state
from ..heuristic import HeuristicSampler
from .common import (PlannerConfig, PlannerResult, default_sampler, goal_radius, in_goal,
                     success_result)
from .tree import Tree

_SAMPLE, _VERTEX = 0, 1


def rgg_radius(free_area: float, q: int) -> float:
    """Connection radius of a 2-D random geometric graph with ``q`` states."""
    q = max(q, 2)
    gamma = 2.0 * math.sqrt(1.5) * math.sqrt(free_area / math.pi)
    return gamma * math.sqrt(math.log(q) / q)


def bit_star_plan(problem: PlanningProblem, config: PlannerConfig,
                  sampler: Optional[HeuristicSampler] = None) -> PlannerResult:
    grid = problem.map
    sampler = default_sampler(grid, sampler)
    if config.sample_limit <= 0:
        return PlannerResult(False, 0, 1)
    rng = random.Random(config.seed)
    r_goal = goal_radius(problem, config)
    goal = problem.goal
    gx, gy = goal
    tree = Tree(problem.start, config.step_size, grid.width, grid.height)
    if in_goal(problem.start, goal, r_goal):
        return success_result(grid, tree, 0, goal, 0)
    free_area = float(grid.free.sum())
    deadline = None if config.time_limit is None else time.perf_counter() + config.time_limit

    xs, ys, g, parent = tree.xs, tree.ys, tree.cost, tree.parent
    sx: list[float] = [gx]
    sy: list[float] = [gy]
    alive: list[bool] = [True]
    SX = SY = ALIVE = None
    drawn = 0
    iterations = 0
    qv: list = []
    qe: list = []
    blocked: set = set()  # (v, kind, t) edges already found in collision
    radius = 0.0

    def h(x, y):
        return math.hypot(gx - x, gy - y)

    def expand(v):
        vx, vy, gv = xs[v], ys[v], g[v]
        d2 = (SX - vx) ** 2 + (SY - vy) ** 2
        for t in np.flatnonzero(ALIVE & (d2 <= radius * radius)).tolist():
            if not alive[t]:
                continue
            c = math.hypot(sx[t] - vx, sy[t] - vy)
            heapq.heappush(qe, (gv + c + h(sx[t], sy[t]), gv + c, v, _SAMPLE, t))
        for w in tree.near(vx, vy, radius):
            if w == v or w == parent[v] or parent[w] == v:
                continue
            c = math.hypot(xs[w] - vx, ys[w] - vy)
            if gv + c < g[w]:
                heapq.heappush(qe, (gv + c + h(xs[w], ys[w]), gv + c, v, _VERTEX, w))

    while True:
        if deadline is not None and time.perf_counter() > deadline:
            break
        if not qv and not qe:
            if drawn >= config.sample_limit:
                break
            n_new = min(config.batch_size, config.sample_limit - drawn)
            for _ in range(n_new):
                for _ in range(config.max_retries):
                    s = sampler.sample(rng)
                    if free_state(grid, s):
                        sx.append(s[0])
                        sy.append(s[1])
                        alive.append(True)
                        break
            drawn += n_new
            SX, SY = np.array(sx), np.array(sy)
            ALIVE = np.array(alive)
            radius = config.bit_radius or rgg_radius(free_area, len(tree) + int(ALIVE.sum()))
            qv = [(g[v] + h(xs[v], ys[v]), v) for v in range(len(tree))]
            heapq.heapify(qv)

        while qv and (not qe or qv[0][0] <= qe[0][0]):
            _, v = heapq.heappop(qv)
            expand(v)
        if not qe:
            continue

        _, _, v, kind, t = heapq.heappop(qe)
        if kind == _SAMPLE:
            if not alive[t]:
                continue
            target = (sx[t], sy[t])
        else:
            target = (xs[t], ys[t])
            if g[v] + math.hypot(target[0] - xs[v], target[1] - ys[v]) >= g[t]:
                continue
        if (v, kind, t) in blocked:
            continue
        iterations += 1
        if not free_edge(grid, tree.state(v), target):
            blocked.add((v, kind, t))
            continue
        if kind == _SAMPLE:
            c = g[v] + math.hypot(target[0] - xs[v], target[1] - ys[v])
            u = tree.add(target, v, c)
            alive[t] = False
            ALIVE[t] = False
            if in_goal(target, goal, r_goal):
                return success_result(grid, tree, u, goal, iterations)
            heapq.heappush(qv, (g[u] + h(*target), u))
        else:
            tree.reparent(t, v)
            heapq.heappush(qv, (g[t] + h(*target), t))

    return PlannerResult(False, iterations, len(tree), tree=tree)
