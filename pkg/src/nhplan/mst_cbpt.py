"""Maximum spanning forest over edge probabilities and its merge record.

Kruskal runs in decreasing probability order (ties by ascending edge index).
Every accepted edge merges two components; the promising-node counts of both
components at that moment give the edge's maximin weight: the number of
promising node pairs whose bottleneck edge it is.

Edge ids: ``k = channel * H * W + i * W + j`` with channel 0 = x (right),
1 = y (down). Node ids: ``i * W + j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .region_graph import EdgeField, RegionMask


@dataclass(frozen=True)
class EdgeRecord:
    index: int
    endpoints: tuple[int, int]
    probability: float
    promising: bool


@dataclass(frozen=True)
class Merge:
    edge: EdgeRecord
    left_promising_count: int   # component of endpoints[0]
    right_promising_count: int  # component of endpoints[1]


@dataclass(frozen=True, eq=False)
class Cbpt:
    height: int
    width: int
    merges: tuple[Merge, ...]
    in_mst: np.ndarray  # (2, H, W) bool


def edge_position(k: int, height: int, width: int) -> tuple[int, int, int]:
    """(channel, row, col) of edge id ``k``."""
    c, rest = divmod(k, height * width)
    i, j = divmod(rest, width)
    return c, i, j


def edge_endpoints(k: int, height: int, width: int) -> tuple[int, int]:
    c, i, j = edge_position(k, height, width)
    u = i * width + j
    return (u, u + 1) if c == 0 else (u, u + width)


def grid_edges(height: int, width: int) -> np.ndarray:
    """All valid edge ids in ascending order (padding slots excluded)."""
    ids = np.arange(2 * height * width).reshape(2, height, width)
    valid = np.ones((2, height, width), dtype=bool)
    valid[0, :, -1] = False
    valid[1, -1, :] = False
    return ids[valid]


class UnionFind:
    """Union by size with path compression; each root carries a promising count."""

    def __init__(self, promising):
        n = len(promising)
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = [int(p) for p in promising]

    def find(self, a: int) -> int:
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, ra: int, rb: int) -> int:
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count[ra] += self.count[rb]
        return ra


def kruskal_merges(field: EdgeField, truth: RegionMask) -> list[tuple[int, int, int, int, int]]:
    """Accepted edges in merge order as ``(k, u, v, left_count, right_count)`` tuples.

    The record-free core of :func:`build_cbpt`, used where only weights are needed.
    """
    h, w = field.shape
    if truth.shape != (h, w):
        raise DimensionMismatch(f"field {field.shape} vs truth {truth.shape}")
    probs = field.stacked().ravel()
    ids = grid_edges(h, w)
    # primary key: decreasing p, secondary: ascending id
    order = ids[np.lexsort((ids, -probs[ids]))]

    uf = UnionFind(truth.mask.ravel().tolist())
    find, count = uf.find, uf.count
    merges = []
    hw = h * w
    for k in order.tolist():
        c, u = divmod(k, hw)
        v = u + 1 if c == 0 else u + w
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        merges.append((k, u, v, count[ru], count[rv]))
        uf.union(ru, rv)
        if len(merges) == hw - 1:  # the grid graph is connected: tree complete
            break
    return merges


def build_cbpt(field: EdgeField, truth: RegionMask) -> Cbpt:
    h, w = field.shape
    probs = field.stacked().ravel().tolist()
    prom = truth.mask.ravel().tolist() if truth.shape == (h, w) else None
    merges = []
    in_mst = np.zeros(2 * h * w, dtype=bool)
    for k, u, v, left, right in kruskal_merges(field, truth):
        rec = EdgeRecord(k, (u, v), probs[k], bool(prom[u] and prom[v]))
        merges.append(Merge(rec, left, right))
        in_mst[k] = True
    return Cbpt(h, w, tuple(merges), in_mst.reshape(2, h, w))


def edge_weights(cbpt: Cbpt) -> dict[int, int]:
    return {m.edge.index: m.left_promising_count * m.right_promising_count
            for m in cbpt.merges if m.edge.promising}


def merge_weights(merges, truth: RegionMask) -> dict[int, int]:
    """:func:`edge_weights` computed straight from :func:`kruskal_merges` output."""
    prom = truth.mask.ravel().tolist()
    return {k: left * right for k, u, v, left, right in merges if prom[u] and prom[v]}
