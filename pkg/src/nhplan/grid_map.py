"""Occupancy-grid world model.

Coordinates: ``x`` is the column, ``y`` is the row, origin at the top-left
corner of the image. A continuous state ``(x, y)`` lives in cell
``(floor(y), floor(x))`` of the occupancy array.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InvalidProblem, OutOfBounds, ParseError

OBSTACLE_THRESHOLD = 128  # gray < 128 is an obstacle


class State(NamedTuple):
    x: float
    y: float


Path = Sequence[State]


@dataclass(frozen=True, eq=False)
class GridMap:
    width: int
    height: int
    occupancy: np.ndarray  # (height, width) bool, True = obstacle
    _flat: bytes = field(init=False, repr=False)

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupancy, dtype=bool)
        if self.width < 2 or self.height < 2:
            raise ValueError(f"map must be at least 2x2, got {self.width}x{self.height}")
        if occ.shape != (self.height, self.width):
            raise ValueError(f"occupancy shape {occ.shape} != ({self.height}, {self.width})")
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)
        object.__setattr__(self, "_flat", occ.tobytes())

    @classmethod
    def from_array(cls, occupancy) -> "GridMap":
        occ = np.asarray(occupancy, dtype=bool)
        return cls(width=occ.shape[1], height=occ.shape[0], occupancy=occ)

    @classmethod
    def empty(cls, width: int, height: int) -> "GridMap":
        return cls(width, height, np.zeros((height, width), dtype=bool))

    def __eq__(self, other):
        if not isinstance(other, GridMap):
            return NotImplemented
        return self._flat == other._flat and self.occupancy.shape == other.occupancy.shape

    def __hash__(self):
        return hash((self.width, self.height, self._flat))

    @property
    def free(self) -> np.ndarray:
        return ~self.occupancy

    def in_bounds(self, s) -> bool:
        return 0.0 <= s[0] < self.width and 0.0 <= s[1] < self.height

    def cell_of(self, s) -> tuple[int, int]:
        """(row, col) of the cell containing ``s``."""
        self._check(s)
        return int(math.floor(s[1])), int(math.floor(s[0]))

    def is_occupied_cell(self, row: int, col: int) -> bool:
        return self._flat[row * self.width + col] != 0

    def _check(self, s):
        if not self.in_bounds(s):
            raise OutOfBounds(f"state {tuple(s)} outside [0,{self.width})x[0,{self.height})")


def free_state(grid: GridMap, s) -> bool:
    grid._check(s)
    return grid._flat[int(s[1]) * grid.width + int(s[0])] == 0


def segment_cells(ax: float, ay: float, bx: float, by: float) -> Iterator[tuple[int, int]]:
    """Yield (row, col) of every cell touched by segment ab.

    Cells are the floor-cells of all points on the segment. Where the segment
    crosses a lattice corner diagonally, all four cells around that corner
    are yielded as well. Cells may repeat. The traversal is computed on a
    canonical endpoint order, so the cell set is symmetric in a and b.
    """
    if (bx, by) < (ax, ay):
        ax, ay, bx, by = bx, by, ax, ay
    yield int(math.floor(ay)), int(math.floor(ax))
    dx = bx - ax
    dy = by - ay
    ts = []
    if dx > 0.0:
        for X in range(int(math.floor(ax)) + 1, int(math.ceil(bx))):
            t = (X - ax) / dx
            ts.append(t)
            if dy != 0.0:
                yc = ay + t * dy
                Y = round(yc)
                if abs(yc - Y) < 1e-9:
                    yield Y - 1, X - 1
                    yield Y - 1, X
                    yield Y, X - 1
                    yield Y, X
    if dy != 0.0:
        lo, hi = (ay, by) if dy > 0 else (by, ay)
        for Y in range(int(math.floor(lo)) + 1, int(math.ceil(hi))):
            ts.append((Y - ay) / dy)
    if ts:
        ts.sort()
        prev = 0.0
        for t in ts:
            m = 0.5 * (prev + t)
            yield int(math.floor(ay + m * dy)), int(math.floor(ax + m * dx))
            prev = t
        m = 0.5 * (prev + 1.0)
        yield int(math.floor(ay + m * dy)), int(math.floor(ax + m * dx))
    yield int(math.floor(by)), int(math.floor(bx))


def traversed_cells(grid: GridMap, a, b) -> set[tuple[int, int]]:
    grid._check(a)
    grid._check(b)
    h, w = grid.height, grid.width
    return {(r, c) for r, c in segment_cells(a[0], a[1], b[0], b[1]) if 0 <= r < h and 0 <= c < w}


def free_edge(grid: GridMap, a, b) -> bool:
    grid._check(a)
    grid._check(b)
    flat, w, h = grid._flat, grid.width, grid.height
    for r, c in segment_cells(a[0], a[1], b[0], b[1]):
        if 0 <= r < h and 0 <= c < w and flat[r * w + c]:
            return False
    return True


def path_cost(path: Path) -> float:
    total = 0.0
    for (x0, y0), (x1, y1) in zip(path, path[1:]):
        total += math.hypot(x1 - x0, y1 - y0)
    return total


def dist(a, b) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


# --- problem and file I/O -------------------------------------------------


@dataclass(frozen=True)
class PlanningProblem:
    map: GridMap
    start: State
    goal: State
    goal_radius: float

    def __post_init__(self):
        object.__setattr__(self, "start", State(float(self.start[0]), float(self.start[1])))
        object.__setattr__(self, "goal", State(float(self.goal[0]), float(self.goal[1])))
        if not self.goal_radius > 0:
            raise InvalidProblem(f"goal_radius must be > 0, got {self.goal_radius}")
        for name, s in (("start", self.start), ("goal", self.goal)):
            if not self.map.in_bounds(s):
                raise InvalidProblem(f"{name} {tuple(s)} is outside the map")
            if not free_state(self.map, s):
                raise InvalidProblem(f"{name} {tuple(s)} lies in an obstacle")


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    i, n = 0, len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
            j += 1
        if j == i:
            raise ParseError("truncated PGM header")
        tokens.append(data[i:j])
        i = j
    # exactly one whitespace byte separates header from raster
    if i >= n or not data[i:i + 1].isspace():
        raise ParseError("missing whitespace after PGM header")
    return tokens, i + 1


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) PGM into a uint8 (height, width) array."""
    with open(path, "rb") as f:
        data = f.read()
    try:
        tokens, offset = _pgm_tokens(data, 4)
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None
    if tokens[0] != b"P5":
        raise ParseError(f"{path}: expected P5 magic, got {tokens[0]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ParseError(f"{path}: non-integer PGM header field") from None
    if width <= 0 or height <= 0 or not 0 < maxval < 256:
        raise ParseError(f"{path}: unsupported PGM header {width}x{height} maxval {maxval}")
    raster = data[offset:offset + width * height]
    if len(raster) != width * height:
        raise ParseError(f"{path}: raster truncated ({len(raster)} of {width * height} bytes)")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, image: np.ndarray) -> None:
    image = np.asarray(image, dtype=np.uint8)
    h, w = image.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(image).tobytes())


def load_map(path) -> GridMap:
    gray = read_pgm(path)
    if gray.shape[0] < 2 or gray.shape[1] < 2:
        raise ParseError(f"{path}: map must be at least 2x2")
    return GridMap.from_array(gray < OBSTACLE_THRESHOLD)


def save_map(path, grid: GridMap) -> None:
    write_pgm(path, np.where(grid.occupancy, 0, 255).astype(np.uint8))


def load_problem(map_file, problem_file) -> PlanningProblem:
    grid = load_map(map_file)
    try:
        with open(problem_file) as f:
            doc = json.load(f)
        start = State(*(float(v) for v in doc["start"]))
        goal = State(*(float(v) for v in doc["goal"]))
        radius = float(doc["goal_radius"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{problem_file}: malformed problem file ({e})") from None
    return PlanningProblem(grid, start, goal, radius)


def problem_to_json(problem: PlanningProblem) -> str:
    # repr-precision floats survive the JSON round trip exactly
    return json.dumps({
        "start": [problem.start.x, problem.start.y],
        "goal": [problem.goal.x, problem.goal.y],
        "goal_radius": problem.goal_radius,
    })


def save_problem(map_file, problem_file, problem: PlanningProblem) -> None:
    if map_file is not None:
        save_map(map_file, problem.map)
    with open(problem_file, "w") as f:
        f.write(problem_to_json(problem) + "\n")


def free_cell_bfs(grid: GridMap, start, goal) -> bool:
    """4-connected reachability between the cells of two states on the free grid."""
    from scipy import ndimage

    labels, _ = ndimage.label(grid.free)
    a = labels[grid.cell_of(start)]
    return a != 0 and a == labels[grid.cell_of(goal)]


def ensure_dir(path) -> None:
    os.makedirs(path, exist_ok=True)


def states(points: Iterable) -> list[State]:
    return [State(float(p[0]), float(p[1])) for p in points]
