"""Lazy states contraction: drop interior states whose neighbours see each other."""
from __future__ import annotations

from ..grid_map import GridMap, State, free_edge


def lsc_shorten(path, grid: GridMap) -> list[State]:
    out = [State(float(p[0]), float(p[1])) for p in path]
    changed = True
    while changed:
        changed = False
        i = 1
        while i < len(out) - 1:
            if free_edge(grid, out[i - 1], out[i + 1]):
                del out[i]
                changed = True
            else:
                i += 1
    return out
