"""Hand-built benchmark maps and promising regions.

Each fixture is a 256x256 map with a topological feature that stresses
uniform sampling (narrow passages, a dead-end pocket), plus a connected
region that follows a feasible route and a disconnected region that
covers the straight start-goal line only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid_map import GridMap, PlanningProblem, State, segment_cells
from .region_graph import RegionMask


@dataclass(frozen=True)
class Fixture:
    name: str
    problem: PlanningProblem
    connected: RegionMask
    disconnected: RegionMask


def stroke(shape, points, width: int) -> np.ndarray:
    """Rasterize a polyline and dilate it to a band roughly ``width`` cells wide."""
    h, w = shape
    out = np.zeros(shape, dtype=bool)
    for (ax, ay), (bx, by) in zip(points, points[1:]):
        for r, c in segment_cells(ax, ay, bx, by):
            if 0 <= r < h and 0 <= c < w:
                out[r, c] = True
    if width > 1:
        rad = (width - 1) / 2.0
        k = int(np.ceil(rad))
        yy, xx = np.mgrid[-k:k + 1, -k:k + 1]
        out = ndimage.binary_dilation(out, structure=(xx ** 2 + yy ** 2) <= rad * rad + 1e-9)
    return out


def _region(occ: np.ndarray, points, width: int) -> RegionMask:
    return RegionMask(stroke(occ.shape, points, width) & ~occ)


def two_passage(size: int = 256) -> Fixture:
    """A thick vertical wall with two narrow gaps near the top and bottom."""
    occ = np.zeros((size, size), dtype=bool)
    occ[:, 120:136] = True
    occ[36:46, 120:136] = False    # upper passage, 10 px
    occ[210:220, 120:136] = False  # lower passage, 10 px
    grid = GridMap.from_array(occ)
    start, goal = State(30.5, 128.5), State(225.5, 128.5)
    problem = PlanningProblem(grid, start, goal, 10.0)
    route = [start, (105.0, 41.0), (151.0, 41.0), goal]
    connected = _region(occ, route, 21)
    disconnected = _region(occ, [start, goal], 31)
    return Fixture("two-passage", problem, connected, disconnected)


def dead_end(size: int = 256) -> Fixture:
    """A U-shaped trap opening towards the start with the goal behind its thin back wall."""
    occ = np.zeros((size, size), dtype=bool)
    occ[60:64, 80:156] = True     # top arm
    occ[192:196, 80:156] = True   # bottom arm
    occ[60:196, 152:156] = True   # back wall, thinner than one step
    grid = GridMap.from_array(occ)
    start, goal = State(40.5, 128.5), State(215.5, 128.5)
    problem = PlanningProblem(grid, start, goal, 10.0)
    route = [start, (60.0, 40.0), (176.0, 40.0), goal]
    connected = _region(occ, route, 21)
    disconnected = _region(occ, [start, goal], 41)
    return Fixture("dead-end", problem, connected, disconnected)


def open_map(size: int = 256) -> Fixture:
    occ = np.zeros((size, size), dtype=bool)
    grid = GridMap.from_array(occ)
    start, goal = State(20.5, 20.5), State(size - 20.5, size - 20.5)
    problem = PlanningProblem(grid, start, goal, 10.0)
    connected = _region(occ, [start, goal], 21)
    mid = 0.5 * (start.x + goal.x)
    # the diagonal band with its middle third cut out
    cut = stroke(occ.shape, [start, goal], 21)
    xs = np.arange(size)[None, :]
    cut &= ~((xs > mid - size / 6) & (xs < mid + size / 6))
    return Fixture("open", problem, connected, RegionMask(cut))


def small_open_problem() -> PlanningProblem:
    """Empty 64x64 map, start (5, 5), goal (58, 58), goal radius 5."""
    return PlanningProblem(GridMap.empty(64, 64), State(5.0, 5.0), State(58.0, 58.0), 5.0)


def walled_problem(size: int = 64) -> PlanningProblem:
    """Start and goal separated by a full-height wall."""
    occ = np.zeros((size, size), dtype=bool)
    occ[:, size // 2 - 2:size // 2 + 2] = True
    return PlanningProblem(GridMap.from_array(occ), State(5.5, 5.5),
                           State(size - 5.5, size - 5.5), 5.0)


FIXTURES = {
    "two-passage": two_passage,
    "dead-end": dead_end,
    "open": open_map,
}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
