"""Edge-based region representation, decoding, and region metrics.

The map is treated as a 4-connected lattice graph. Entry ``(i, j)`` of the
x channel owns the edge from node ``(i, j)`` to its right neighbour, entry
``(i, j)`` of the y channel owns the edge to the node below. The last column
of the x channel and the last row of the y channel are zero padding.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import (DimensionMismatch, EmptyInput, EmptyTruth, InvalidThreshold,
                     ParseError)
from .grid_map import PlanningProblem, read_pgm, write_pgm

DEFAULT_THRESHOLD = 0.09

_FOUR = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True, eq=False)
class EdgeField:
    px: np.ndarray
    py: np.ndarray

    def __post_init__(self):
        px = np.array(self.px, dtype=np.float64)
        py = np.array(self.py, dtype=np.float64)
        if px.ndim != 2 or px.shape != py.shape:
            raise DimensionMismatch(f"channel shapes differ: {px.shape} vs {py.shape}")
        if np.any(px[:, -1] != 0) or np.any(py[-1, :] != 0):
            raise ValueError("edge field padding (last x column, last y row) must be zero")
        if not (np.all((px >= 0) & (px <= 1)) and np.all((py >= 0) & (py <= 1))):
            raise ValueError("edge probabilities must lie in [0, 1]")
        px.setflags(write=False)
        py.setflags(write=False)
        object.__setattr__(self, "px", px)
        object.__setattr__(self, "py", py)

    @property
    def height(self) -> int:
        return self.px.shape[0]

    @property
    def width(self) -> int:
        return self.px.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.px.shape

    def stacked(self) -> np.ndarray:
        return np.stack([self.px, self.py])

    def __eq__(self, other):
        if not isinstance(other, EdgeField):
            return NotImplemented
        return np.array_equal(self.px, other.px) and np.array_equal(self.py, other.py)

    @classmethod
    def zeros(cls, height: int, width: int) -> "EdgeField":
        z = np.zeros((height, width))
        return cls(z, z)


@dataclass(frozen=True, eq=False)
class RegionMask:
    mask: np.ndarray

    def __post_init__(self):
        m = np.array(self.mask, dtype=bool)
        if m.ndim != 2:
            raise DimensionMismatch(f"region mask must be 2-D, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    def __eq__(self, other):
        if not isinstance(other, RegionMask):
            return NotImplemented
        return np.array_equal(self.mask, other.mask)


@dataclass(frozen=True, eq=False)
class NodePairField:
    c1: np.ndarray  # unpromising likelihood
    c2: np.ndarray  # promising likelihood

    def __post_init__(self):
        c1 = np.array(self.c1, dtype=np.float64)
        c2 = np.array(self.c2, dtype=np.float64)
        if c1.ndim != 2 or c1.shape != c2.shape:
            raise DimensionMismatch(f"channel shapes differ: {c1.shape} vs {c2.shape}")
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    @property
    def shape(self) -> tuple[int, int]:
        return self.c1.shape


def node_to_edge_labels(region: RegionMask) -> EdgeField:
    m = region.mask
    px = np.zeros(m.shape)
    py = np.zeros(m.shape)
    px[:, :-1] = m[:, :-1] & m[:, 1:]
    py[:-1, :] = m[:-1, :] & m[1:, :]
    return EdgeField(px, py)


def decode_region(field: EdgeField, t: float = DEFAULT_THRESHOLD) -> RegionMask:
    """A node is promising when the mean of its two owned edges exceeds ``t``.

    Padding makes last-row and last-column nodes depend on a single edge
    that is halved by the mean.
    """
    if not 0.0 <= t < 1.0:
        raise InvalidThreshold(f"threshold must be in [0, 1), got {t}")
    return RegionMask((field.px + field.py) / 2.0 > t)


def decode_region_nodepair(field: NodePairField) -> RegionMask:
    return RegionMask(field.c1 < field.c2)


def is_connected(region: RegionMask, problem: PlanningProblem) -> bool:
    """Start-to-goal reachability over 4-connected promising cells.

    The start and goal cells are always treated as promising.
    """
    grid = problem.map
    if region.shape != (grid.height, grid.width):
        raise DimensionMismatch(f"region {region.shape} vs map {(grid.height, grid.width)}")
    s = grid.cell_of(problem.start)
    g = grid.cell_of(problem.goal)
    if s == g:
        return True
    allowed = region.mask.copy()
    allowed[s] = True
    allowed[g] = True
    labels, _ = ndimage.label(allowed, structure=_FOUR)
    return bool(labels[s] == labels[g])


def connectivity_rate(cases) -> float:
    cases = list(cases)
    if not cases:
        raise EmptyInput("connectivity_rate needs at least one case")
    return sum(is_connected(m, p) for m, p in cases) / len(cases)


def false_negative_rate(pred: RegionMask, truth: RegionMask) -> float:
    if pred.shape != truth.shape:
        raise DimensionMismatch(f"pred {pred.shape} vs truth {truth.shape}")
    n_truth = int(truth.mask.sum())
    if n_truth == 0:
        raise EmptyTruth("ground truth has no promising node")
    return int((truth.mask & ~pred.mask).sum()) / n_truth


# --- file formats ----------------------------------------------------------

_HEADER = struct.Struct("<4sIII")


def _write_two_channel(path, magic: bytes, a: np.ndarray, b: np.ndarray) -> None:
    h, w = a.shape
    with open(path, "wb") as f:
        f.write(_HEADER.pack(magic, w, h, 0))
        f.write(np.ascontiguousarray(a, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(b, dtype="<f4").tobytes())


def _read_two_channel(path, magic: bytes) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < _HEADER.size:
        raise ParseError(f"{path}: file shorter than header")
    tag, w, h, reserved = _HEADER.unpack_from(data)
    if tag != magic:
        raise ParseError(f"{path}: bad magic {tag!r}, expected {magic!r}")
    if reserved != 0:
        raise ParseError(f"{path}: reserved header bytes must be zero")
    n = w * h
    if len(data) != _HEADER.size + 8 * n:
        raise ParseError(f"{path}: payload size {len(data) - _HEADER.size} != {8 * n}")
    payload = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    return payload[:n].reshape(h, w), payload[n:].reshape(h, w)


def write_efld(path, field: EdgeField) -> None:
    """Write an edge field as float32; values not representable in float32 are rounded."""
    _write_two_channel(path, b"EFLD", field.px, field.py)


def read_efld(path) -> EdgeField:
    px, py = _read_two_channel(path, b"EFLD")
    return EdgeField(px.astype(np.float64), py.astype(np.float64))


def write_gradient_efld(path, gx: np.ndarray, gy: np.ndarray) -> None:
    """Gradients share the EFLD layout but are not probabilities."""
    _write_two_channel(path, b"EFLD", gx, gy)


def write_nodepair(path, field: NodePairField) -> None:
    _write_two_channel(path, b"NPFD", field.c1, field.c2)


def read_nodepair(path) -> NodePairField:
    c1, c2 = _read_two_channel(path, b"NPFD")
    return NodePairField(c1.astype(np.float64), c2.astype(np.float64))


def write_region(path, region: RegionMask) -> None:
    write_pgm(path, np.where(region.mask, 255, 0).astype(np.uint8))


def read_region(path) -> RegionMask:
    return RegionMask(read_pgm(path) >= 128)
