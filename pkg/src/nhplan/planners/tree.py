"""Search tree with a grid-bucket spatial index."""
from __future__ import annotations

import math

from ..grid_map import State

_BRUTE_FORCE_BELOW = 48


class Tree:
    """Vertices, parent links and cost-to-come, plus bucketed nearest lookup.

    Vertex 0 is the root. Nearest and radius queries are exact; ties go to
    the lowest vertex index.
    """

    def __init__(self, root, bucket_size: float, width: float, height: float):
        self.bucket = float(bucket_size)
        self.nbx = max(1, int(math.ceil(width / self.bucket)))
        self.nby = max(1, int(math.ceil(height / self.bucket)))
        self.xs: list[float] = []
        self.ys: list[float] = []
        self.parent: list[int] = []
        self.cost: list[float] = []
        self.children: list[list[int]] = []
        self._buckets: dict[tuple[int, int], list[int]] = {}
        self.add(root, -1, 0.0)

    def __len__(self):
        return len(self.xs)

    def state(self, v: int) -> State:
        return State(self.xs[v], self.ys[v])

    def add(self, s, parent: int, cost: float) -> int:
        v = len(self.xs)
        self.xs.append(s[0])
        self.ys.append(s[1])
        self.parent.append(parent)
        self.cost.append(cost)
        self.children.append([])
        if parent >= 0:
            self.children[parent].append(v)
        key = (int(s[0] // self.bucket), int(s[1] // self.bucket))
        self._buckets.setdefault(key, []).append(v)
        return v

    def nearest(self, x: float, y: float) -> int:
        xs, ys = self.xs, self.ys
        n = len(xs)
        if n <= _BRUTE_FORCE_BELOW:
            best, best_d = 0, math.inf
            for v in range(n):
                d = (xs[v] - x) ** 2 + (ys[v] - y) ** 2
                if d < best_d:
                    best, best_d = v, d
            return best
        bx, by = int(x // self.bucket), int(y // self.bucket)
        buckets = self._buckets
        best, best_d = -1, math.inf
        rmax = max(self.nbx, self.nby)
        for r in range(rmax + 1):
            for key in _ring(bx, by, r):
                for v in buckets.get(key, ()):
                    d = (xs[v] - x) ** 2 + (ys[v] - y) ** 2
                    if d < best_d or (d == best_d and v < best):
                        best, best_d = v, d
            # anything in ring r+1 or beyond is at least r buckets away
            if best >= 0 and best_d < (r * self.bucket) ** 2:
                break
        return best

    def near(self, x: float, y: float, radius: float) -> list[int]:
        """Vertices within ``radius`` (inclusive), in ascending index order."""
        xs, ys = self.xs, self.ys
        r2 = radius * radius
        reach = int(math.ceil(radius / self.bucket))
        bx, by = int(x // self.bucket), int(y // self.bucket)
        out = []
        for i in range(bx - reach, bx + reach + 1):
            for j in range(by - reach, by + reach + 1):
                for v in self._buckets.get((i, j), ()):
                    if (xs[v] - x) ** 2 + (ys[v] - y) ** 2 <= r2:
                        out.append(v)
        out.sort()
        return out

    def reparent(self, v: int, new_parent: int) -> None:
        """Move ``v`` under ``new_parent`` and refresh costs in its subtree."""
        old = self.parent[v]
        self.children[old].remove(v)
        self.parent[v] = new_parent
        self.children[new_parent].append(v)
        stack = [v]
        xs, ys, cost, parent = self.xs, self.ys, self.cost, self.parent
        while stack:
            u = stack.pop()
            p = parent[u]
            cost[u] = cost[p] + math.hypot(xs[u] - xs[p], ys[u] - ys[p])
            stack.extend(self.children[u])

    def path_to(self, v: int) -> list[State]:
        out = []
        while v >= 0:
            out.append(State(self.xs[v], self.ys[v]))
            v = self.parent[v]
        out.reverse()
        return out

    def edges(self):
        for v in range(1, len(self.xs)):
            yield self.parent[v], v


def _ring(bx: int, by: int, r: int):
    if r == 0:
        yield bx, by
        return
    for i in range(bx - r, bx + r + 1):
        yield i, by - r
        yield i, by + r
    for j in range(by - r + 1, by + r):
        yield bx - r, j
        yield bx + r, j
