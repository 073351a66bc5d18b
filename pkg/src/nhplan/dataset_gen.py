"""Random obstacle maps and RRT-derived ground-truth promising regions.

Five obstacle families. Families 1-3 are the "similar" group, 4-5 the
"dissimilar" group used only for evaluation:

1. ``blocks``     axis-aligned rectangles
2. ``walls``      long thin walls, each with 1-3 gaps
3. ``blobs``      random convex polygons
4. ``dead_ends``  U- and L-shaped structures (U pockets are dead ends)
5. ``clutter``    many small mixed shapes

Every map is a pure function of its recipe seed.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull

from .errors import GenerationFailed, InsufficientSolutions, Unsolvable
from .grid_map import (GridMap, PlanningProblem, State, free_cell_bfs, save_map,
                       save_problem, segment_cells)
from .heuristic import uniform_sampler
from .planners import PlannerConfig, lsc_shorten, rrt_plan
from .region_graph import (EdgeField, RegionMask, node_to_edge_labels, write_efld,
                           write_region)

log = logging.getLogger(__name__)

MAX_RETRIES = 100
MIN_FREE_FRACTION = 0.3
_FOUR = ndimage.generate_binary_structure(2, 1)


class Category(str, Enum):
    BLOCKS = "blocks"
    WALLS = "walls"
    BLOBS = "blobs"
    DEAD_ENDS = "dead_ends"
    CLUTTER = "clutter"

    @property
    def group(self) -> str:
        return "dissimilar" if self in (Category.DEAD_ENDS, Category.CLUTTER) else "similar"


DEFAULT_COUNTS = {
    Category.BLOCKS: (8, 16),
    Category.WALLS: (1, 3),
    Category.BLOBS: (6, 12),
    Category.DEAD_ENDS: (3, 6),
    Category.CLUTTER: (30, 60),
}


@dataclass(frozen=True)
class MapRecipe:
    category: Category
    size: tuple[int, int] = (256, 256)  # (H, W)
    obstacle_count: Optional[tuple[int, int]] = None  # None: family default
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "category", Category(self.category))
        object.__setattr__(self, "size", tuple(int(v) for v in self.size))
        if self.size[0] < 64 or self.size[1] < 64:
            raise ValueError(f"map size must be at least 64x64, got {self.size}")
        if self.obstacle_count is not None:
            lo, hi = self.obstacle_count
            if not 0 <= lo <= hi:
                raise ValueError(f"bad obstacle_count range {self.obstacle_count}")
            object.__setattr__(self, "obstacle_count", (int(lo), int(hi)))

    @property
    def counts(self) -> tuple[int, int]:
        return self.obstacle_count or DEFAULT_COUNTS[self.category]


@dataclass
class MapReport:
    attempts: int
    free_fraction: float
    dead_ends: list = field(default_factory=list)  # (row, col, direction, depth) per verified pocket


@dataclass(frozen=True)
class DatasetSample:
    map: GridMap
    problem: PlanningProblem
    region: RegionMask
    edges: EdgeField


def derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


# --- obstacle families ------------------------------------------------------------

def _rect(occ, r0, c0, r1, c1):
    h, w = occ.shape
    occ[max(r0, 0):min(r1, h), max(c0, 0):min(c1, w)] = True


def _blocks(occ, rng, n):
    h, w = occ.shape
    s = min(h, w)
    for _ in range(n):
        bh, bw = rng.integers(s // 16, s // 5, size=2)
        r, c = rng.integers(0, h - bh), rng.integers(0, w - bw)
        _rect(occ, r, c, r + bh, c + bw)


def _walls(occ, rng, n):
    h, w = occ.shape
    for _ in range(n):
        vertical = bool(rng.integers(2))
        length = w if not vertical else h
        across = h if not vertical else w
        thick = int(rng.integers(4, 9))
        pos = int(rng.integers(across // 6, across - across // 6 - thick))
        span = np.ones(length, dtype=bool)
        for _ in range(int(rng.integers(1, 4))):
            gw = int(rng.integers(12, 31))
            g0 = int(rng.integers(0, length - gw))
            span[g0:g0 + gw] = False
        if vertical:
            occ[:, pos:pos + thick] |= span[:, None]
        else:
            occ[pos:pos + thick, :] |= span[None, :]


def _convex(occ, rng, cy, cx, radius, npts=7):
    ang = rng.uniform(0, 2 * np.pi, npts)
    rad = rng.uniform(0.4, 1.0, npts) * radius
    pts = np.column_stack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)])
    hull = ConvexHull(pts)
    h, w = occ.shape
    yy, xx = np.mgrid[0:h, 0:w]
    inside = np.ones((h, w), dtype=bool)
    for a, b, c in hull.equations:  # a*x + b*y + c <= 0 inside
        inside &= a * (xx + 0.5) + b * (yy + 0.5) + c <= 0
    occ |= inside


def _blobs(occ, rng, n):
    h, w = occ.shape
    s = min(h, w)
    for _ in range(n):
        radius = rng.uniform(s / 20, s / 7)
        _convex(occ, rng, rng.uniform(0, h), rng.uniform(0, w), radius)


_DIRS = {"left": (0, -1), "right": (0, 1), "up": (-1, 0), "down": (1, 0)}


def _u_shape(occ, rng, pockets):
    h, w = occ.shape
    s = min(h, w)
    depth = int(rng.integers(s // 8, s // 4))
    width = int(rng.integers(s // 10, s // 5))
    t = int(rng.integers(4, 7))
    opening = ["left", "right", "up", "down"][int(rng.integers(4))]
    # build in a local frame opening to the left, then rotate
    local = np.zeros((width + 2 * t, depth + t), dtype=bool)
    local[:t, :] = True
    local[-t:, :] = True
    local[:, -t:] = True
    rot = {"left": 0, "down": 1, "right": 2, "up": 3}[opening]
    shape = np.rot90(local, rot)
    sh, sw = shape.shape
    if sh >= h or sw >= w:
        return
    r0, c0 = int(rng.integers(0, h - sh)), int(rng.integers(0, w - sw))
    occ[r0:r0 + sh, c0:c0 + sw] |= shape
    # innermost free cell at the closed end, in local (row, col), then rotated
    lr, lc = t + width // 2, depth - 1
    rr, rc = lr, lc
    lh, lw = local.shape
    for _ in range(rot):  # np.rot90 maps (r, c) -> (W-1-c, r) with W the current width
        rr, rc = lw - 1 - rc, rr
        lh, lw = lw, lh
    pockets.append((r0 + rr, c0 + rc, opening, depth))


def _l_shape(occ, rng):
    h, w = occ.shape
    s = min(h, w)
    a, b = rng.integers(s // 8, s // 4, size=2)
    t = int(rng.integers(4, 7))
    r, c = int(rng.integers(0, h - a)), int(rng.integers(0, w - b))
    _rect(occ, r, c, r + a, c + t)
    if rng.integers(2):
        _rect(occ, r + a - t, c, r + a, c + b)
    else:
        _rect(occ, r, c, r + t, c + b)


def _dead_ends(occ, rng, n, pockets):
    for k in range(n):
        if k == 0 or rng.random() < 0.7:
            _u_shape(occ, rng, pockets)
        else:
            _l_shape(occ, rng)


def _clutter(occ, rng, n):
    h, w = occ.shape
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(n):
        kind = int(rng.integers(3))
        r, c = int(rng.integers(0, h)), int(rng.integers(0, w))
        if kind == 0:
            a, b = rng.integers(4, 15, size=2)
            _rect(occ, r, c, r + a, c + b)
        elif kind == 1:
            rad = rng.uniform(2, 7)
            occ |= (yy + 0.5 - r) ** 2 + (xx + 0.5 - c) ** 2 <= rad * rad
        else:
            length = int(rng.integers(8, 25))
            if rng.integers(2):
                _rect(occ, r, c, r + 3, c + length)
            else:
                _rect(occ, r, c, r + length, c + 3)


def pocket_is_dead_end(occ: np.ndarray, row: int, col: int, opening: str, depth: int) -> bool:
    """True when rays from (row, col) hit walls on three sides and escape on the fourth.

    A ray "hits" when it meets an obstacle within ``depth`` cells; the opening
    ray must stay free for ``depth`` cells.
    """
    h, w = occ.shape
    if not (0 <= row < h and 0 <= col < w) or occ[row, col]:
        return False
    for name, (dr, dc) in _DIRS.items():
        hit = False
        for k in range(1, depth + 1):
            r, c = row + k * dr, col + k * dc
            if not (0 <= r < h and 0 <= c < w):
                hit = True
                break
            if occ[r, c]:
                hit = True
                break
        if hit == (name == opening):
            return False
    return True


def _largest_free_fraction(occ: np.ndarray) -> float:
    labels, n = ndimage.label(~occ, structure=_FOUR)
    if n == 0:
        return 0.0
    return float(np.bincount(labels.ravel())[1:].max()) / occ.size


def gen_map_with_report(recipe: MapRecipe) -> tuple[GridMap, MapReport]:
    lo, hi = recipe.counts
    for attempt in range(MAX_RETRIES):
        rng = np.random.default_rng(derive_seed(recipe.seed, attempt))
        occ = np.zeros(recipe.size, dtype=bool)
        n = int(rng.integers(lo, hi + 1))
        pockets: list = []
        cat = recipe.category
        if cat is Category.BLOCKS:
            _blocks(occ, rng, n)
        elif cat is Category.WALLS:
            _walls(occ, rng, n)
        elif cat is Category.BLOBS:
            _blobs(occ, rng, n)
        elif cat is Category.DEAD_ENDS:
            _dead_ends(occ, rng, n, pockets)
        else:
            _clutter(occ, rng, n)
        frac = _largest_free_fraction(occ)
        if frac < MIN_FREE_FRACTION:
            continue
        verified = [p for p in pockets if pocket_is_dead_end(occ, *p)]
        if cat is Category.DEAD_ENDS and not verified:
            continue
        return GridMap.from_array(occ), MapReport(attempt + 1, frac, verified)
    raise GenerationFailed(f"no valid {recipe.category.value} map after {MAX_RETRIES} attempts "
                           f"(seed {recipe.seed})")


def gen_map(recipe: MapRecipe) -> GridMap:
    return gen_map_with_report(recipe)[0]


# --- problems and ground truth ----------------------------------------------------------


def sample_problem(grid: GridMap, seed: int, goal_radius: float = 10.0,
                   min_separation: Optional[float] = None) -> PlanningProblem:
    """Start and goal at free cell centres of the largest free component, far apart."""
    if min_separation is None:
        min_separation = 0.4 * min(grid.width, grid.height)
    labels, n = ndimage.label(grid.free, structure=_FOUR)
    if n == 0:
        raise GenerationFailed("map has no free cell")
    biggest = int(np.argmax(np.bincount(labels.ravel())[1:])) + 1
    cells = np.flatnonzero(labels.ravel() == biggest)
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        a, b = rng.choice(cells, size=2)
        ra, ca = divmod(int(a), grid.width)
        rb, cb = divmod(int(b), grid.width)
        if np.hypot(ra - rb, ca - cb) >= min_separation:
            return PlanningProblem(grid, State(ca + 0.5, ra + 0.5), State(cb + 0.5, rb + 0.5),
                                   goal_radius)
    raise GenerationFailed(f"could not place start/goal {min_separation} px apart")


def rasterize_path(grid: GridMap, path, stroke: int = 2) -> np.ndarray:
    """Supercover cells of a path, dilated by a ``stroke`` x ``stroke`` square, within free space."""
    h, w = grid.height, grid.width
    cells = np.zeros((h, w), dtype=bool)
    for a, b in zip(path, path[1:]):
        for r, c in segment_cells(a[0], a[1], b[0], b[1]):
            if 0 <= r < h and 0 <= c < w:
                cells[r, c] = True
    if len(path) == 1:
        cells[grid.cell_of(path[0])] = True
    if stroke > 1:
        cells = ndimage.binary_dilation(cells, structure=np.ones((stroke, stroke), dtype=bool))
    return cells & grid.free


def gen_ground_truth(problem: PlanningProblem, runs: int = 50, stroke: int = 2, seed: int = 0,
                     config: Optional[PlannerConfig] = None,
                     max_attempts: Optional[int] = None) -> DatasetSample:
    """Union of ``runs`` LSC-shortened RRT solutions, rasterized into a region.

    Only solutions whose path reaches the exact goal state count. Up to
    ``max_attempts`` (default ``2 * runs``) seeds are tried.
    """
    grid = problem.map
    if not free_cell_bfs(grid, problem.start, problem.goal):
        raise Unsolvable("start and goal are not connected on the free grid")
    config = config or PlannerConfig(max_iterations=10_000)
    max_attempts = max_attempts or 2 * runs
    sampler = uniform_sampler(grid.width, grid.height)
    region = np.zeros((grid.height, grid.width), dtype=bool)
    found = 0
    for k in range(max_attempts):
        if found == runs:
            break
        cfg = PlannerConfig(**{**asdict(config), "seed": derive_seed(seed, k),
                               "heuristic_bias": 0.0})
        result = rrt_plan(problem, cfg, sampler)
        if not result.success or result.path[-1] != problem.goal:
            continue
        region |= rasterize_path(grid, lsc_shorten(result.path, grid), stroke)
        found += 1
    if found < runs:
        raise InsufficientSolutions(f"only {found} of {runs} RRT runs reached the goal "
                                    f"in {max_attempts} attempts")
    mask = RegionMask(region)
    return DatasetSample(grid, problem, mask, node_to_edge_labels(mask))


# --- dataset on disk -------------------------------------------------------------


def _sample_files(sample_id: str) -> dict[str, str]:
    return {
        "map": f"{sample_id}_map.pgm",
        "problem": f"{sample_id}_problem.json",
        "region": f"{sample_id}_region.pgm",
        "edges": f"{sample_id}_edges.efld",
    }


def write_sample(out_dir, sample_id: str, sample: DatasetSample) -> dict[str, str]:
    files = _sample_files(sample_id)
    save_problem(os.path.join(out_dir, files["map"]), os.path.join(out_dir, files["problem"]),
                 sample.problem)
    write_region(os.path.join(out_dir, files["region"]), sample.region)
    write_efld(os.path.join(out_dir, files["edges"]), sample.edges)
    return files


def gen_dataset(recipes, problems_per_map: int, out_dir, runs: int = 50, stroke: int = 2,
                goal_radius: float = 10.0, max_iterations: int = 10_000,
                problem_attempts: int = 10) -> dict:
    """Generate and write samples for every recipe; returns (and writes) the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    entries, rejected = [], []
    config = PlannerConfig(max_iterations=max_iterations)
    for m, recipe in enumerate(recipes):
        grid, report = gen_map_with_report(recipe)
        for p in range(problems_per_map):
            sample_id = f"{m:05d}_{p:02d}"
            for attempt in range(problem_attempts):
                pseed = derive_seed(recipe.seed, 1_000_003, p, attempt)
                problem = sample_problem(grid, pseed, goal_radius)
                gt_seed = derive_seed(pseed, 7)
                try:
                    sample = gen_ground_truth(problem, runs, stroke, gt_seed, config)
                except (Unsolvable, InsufficientSolutions) as e:
                    log.warning("sample %s attempt %d rejected: %s", sample_id, attempt, e)
                    rejected.append({"id": sample_id, "attempt": attempt, "reason": str(e)})
                    continue
                files = write_sample(out_dir, sample_id, sample)
                entries.append({
                    "id": sample_id,
                    "category": recipe.category.value,
                    "group": recipe.category.group,
                    "map_seed": recipe.seed,
                    "size": list(recipe.size),
                    "obstacle_count": list(recipe.counts),
                    "problem_index": p,
                    "problem_attempt": attempt,
                    "problem_seed": pseed,
                    "gt_seed": gt_seed,
                    "files": files,
                })
                break
            else:
                raise GenerationFailed(f"sample {sample_id}: no usable problem after "
                                       f"{problem_attempts} attempts")
    manifest = {
        "version": 1,
        "runs": runs,
        "stroke": stroke,
        "goal_radius": goal_radius,
        "max_iterations": max_iterations,
        "problems_per_map": problems_per_map,
        "recipes": [{"category": r.category.value, "size": list(r.size),
                     "obstacle_count": list(r.counts), "seed": r.seed} for r in recipes],
        "samples": entries,
        "rejected": rejected,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest


def regenerate(manifest: dict, out_dir) -> dict:
    """Rebuild a dataset from its manifest into ``out_dir``."""
    recipes = [MapRecipe(Category(r["category"]), tuple(r["size"]), tuple(r["obstacle_count"]),
                         r["seed"]) for r in manifest["recipes"]]
    return gen_dataset(recipes, manifest["problems_per_map"], out_dir, manifest["runs"],
                       manifest["stroke"], manifest["goal_radius"], manifest["max_iterations"])


def load_manifest(path) -> dict:
    with open(path) as f:
        return json.load(f)


def recipes_for(category, count: int, size: tuple[int, int], seed: int) -> list[MapRecipe]:
    cats = list(Category) if category in (None, "all") else [Category(category)]
    return [MapRecipe(cats[k % len(cats)], size, None, derive_seed(seed, k)) for k in range(count)]
