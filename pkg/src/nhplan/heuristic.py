"""Promising-region biased sampling.

With probability ``bias`` a sample is drawn from a uniformly chosen promising
cell (plus uniform jitter inside it); otherwise it is uniform over the whole
map extent. An empty region silently degrades to uniform sampling.
"""
from __future__ import annotations

import math
import random

import numpy as np

from .errors import InvalidBias
from .grid_map import State


class HeuristicSampler:
    def __init__(self, mask: np.ndarray, bias: float):
        if not 0.0 <= bias <= 1.0 or math.isnan(bias):
            raise InvalidBias(f"bias must be in [0, 1], got {bias}")
        mask = np.asarray(mask, dtype=bool)
        self.height, self.width = mask.shape
        self.bias = float(bias)
        self.promising_cells = np.flatnonzero(mask)
        self._cells = self.promising_cells.tolist()
        self._xmax = math.nextafter(float(self.width), 0.0)
        self._ymax = math.nextafter(float(self.height), 0.0)
        self.fallback_count = 0

    def __repr__(self):
        return (f"HeuristicSampler({self.width}x{self.height}, "
                f"{len(self._cells)} promising cells, bias={self.bias})")

    def sample(self, rng: random.Random) -> State:
        # one mixture draw per sample regardless of bias, so bias=0 replays plain uniform sampling
        u = rng.random()
        if u < self.bias:
            if self._cells:
                n = len(self._cells)
                c = self._cells[min(int(rng.random() * n), n - 1)]
                row, col = divmod(c, self.width)
                # col + r can round up to col + 1; keep the sample inside its cell
                x = min(col + rng.random(), math.nextafter(col + 1.0, 0.0))
                y = min(row + rng.random(), math.nextafter(row + 1.0, 0.0))
                return State(x, y)
            self.fallback_count += 1
        return State(min(self.width * rng.random(), self._xmax),
                     min(self.height * rng.random(), self._ymax))


def build_sampler(region, bias: float) -> HeuristicSampler:
    """``region`` is a RegionMask or a boolean (H, W) array."""
    mask = getattr(region, "mask", region)
    return HeuristicSampler(mask, bias)


def uniform_sampler(width: int, height: int) -> HeuristicSampler:
    return HeuristicSampler(np.zeros((height, width), dtype=bool), 0.0)


def sample(sampler: HeuristicSampler, rng: random.Random) -> State:
    return sampler.sample(rng)
