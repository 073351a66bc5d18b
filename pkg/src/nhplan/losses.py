"""Directional BCE, pooled Dice and the maximin connectivity loss, with gradients.

All gradients are with respect to the predicted edge probabilities. The
connectivity-loss gradient holds the spanning tree and the maximin weights
fixed for the current prediction, which is exact away from probability ties.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateDenominator, DimensionMismatch, InconsistentTruth,
                     NonBinaryTruth)
from .mst_cbpt import edge_position, kruskal_merges, merge_weights
from .region_graph import EdgeField, RegionMask, node_to_edge_labels

EPS = 1e-7


@dataclass(frozen=True, eq=False)
class LossOutput:
    value: float
    grad_x: np.ndarray
    grad_y: np.ndarray

    @property
    def grad(self) -> np.ndarray:
        return np.stack([self.grad_x, self.grad_y])

    def __add__(self, other: "LossOutput") -> "LossOutput":
        return LossOutput(self.value + other.value,
                          self.grad_x + other.grad_x, self.grad_y + other.grad_y)


def _check_shapes(a, b) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")


def bce_xy(truth: EdgeField, pred: EdgeField) -> LossOutput:
    """Summed binary cross entropy over both channels, log arguments clamped to [EPS, 1-EPS]."""
    _check_shapes(truth, pred)
    P = truth.stacked()
    if not np.all((P == 0) | (P == 1)):
        raise NonBinaryTruth("BCE truth entries must be 0 or 1")
    Q = pred.stacked()
    Qc = np.clip(Q, EPS, 1.0 - EPS)
    value = -float(np.sum(P * np.log(Qc) + (1.0 - P) * np.log(1.0 - Qc)))
    grad = -(P / Qc - (1.0 - P) / (1.0 - Qc))
    grad[(Q <= EPS) | (Q >= 1.0 - EPS)] = 0.0
    return LossOutput(value, grad[0], grad[1])


def dice_xy(truth: EdgeField, pred: EdgeField) -> LossOutput:
    """One minus the Dice coefficient pooled over both channels."""
    _check_shapes(truth, pred)
    P = truth.stacked()
    Q = pred.stacked()
    inter = float(np.sum(P * Q))
    denom = float(np.sum(Q * Q) + np.sum(P * P))
    if denom == 0.0:
        raise DegenerateDenominator("truth and prediction are both identically zero")
    value = 1.0 - 2.0 * inter / denom
    grad = -(2.0 * P * denom - 2.0 * inter * 2.0 * Q) / denom ** 2
    return LossOutput(value, grad[0], grad[1])


def connectivity_loss(truth_region: RegionMask, pred: EdgeField) -> LossOutput:
    h, w = pred.shape
    if truth_region.shape != (h, w):
        raise DimensionMismatch(f"region {truth_region.shape} vs prediction {pred.shape}")
    weights = merge_weights(kruskal_merges(pred, truth_region), truth_region)
    grad = np.zeros((2, h, w))
    total_w = sum(weights.values())
    if total_w == 0:
        return LossOutput(0.0, grad[0], grad[1])
    Q = pred.stacked()
    acc = 0.0
    for k, wk in weights.items():
        pos = edge_position(k, h, w)
        r = 1.0 - Q[pos]
        acc += wk * r * r
        grad[pos] = -2.0 * wk * r / total_w
    return LossOutput(acc / total_w, grad[0], grad[1])


def total_loss(truth: EdgeField, truth_region: RegionMask, pred: EdgeField) -> LossOutput:
    if truth != node_to_edge_labels(truth_region):
        raise InconsistentTruth("edge truth does not match the labels of the truth region")
    return bce_xy(truth, pred) + dice_xy(truth, pred) + connectivity_loss(truth_region, pred)


def loss_report(truth: EdgeField, truth_region: RegionMask, pred: EdgeField) -> dict:
    """Component values and the summed output, as used by the ``loss`` CLI."""
    if truth != node_to_edge_labels(truth_region):
        raise InconsistentTruth("edge truth does not match the labels of the truth region")
    parts = {
        "bce": bce_xy(truth, pred),
        "dice": dice_xy(truth, pred),
        "conn": connectivity_loss(truth_region, pred),
    }
    total = parts["bce"] + parts["dice"] + parts["conn"]
    return {**parts, "total": total}


# --- finite-difference checking -----------------------------------------------


def finite_difference_grad(fn, pred: EdgeField, positions, step: float = 1e-5) -> np.ndarray:
    """Central differences of ``fn(pred).value`` at the given (channel, row, col) positions."""
    base = pred.stacked()
    out = np.empty(len(positions))
    for n, pos in enumerate(positions):
        plus = base.copy()
        minus = base.copy()
        plus[pos] += step
        minus[pos] -= step
        f_plus = fn(EdgeField(plus[0], plus[1])).value
        f_minus = fn(EdgeField(minus[0], minus[1])).value
        out[n] = (f_plus - f_minus) / (2.0 * step)
    return out


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8) -> float:
    """Largest relative disagreement over entries whose analytic magnitude exceeds ``floor``."""
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    sel = np.abs(analytic) > floor
    if not sel.any():
        return 0.0
    a, n = analytic[sel], numeric[sel]
    return float(np.max(np.abs(a - n) / np.maximum(np.abs(a), np.abs(n))))


def valid_positions(height: int, width: int) -> list[tuple[int, int, int]]:
    """Non-padding (channel, row, col) entries of an edge field."""
    out = [(0, i, j) for i in range(height) for j in range(width - 1)]
    out += [(1, i, j) for i in range(height - 1) for j in range(width)]
    return out


def random_field(rng: np.random.Generator, height: int, width: int,
                 low: float = 0.05, high: float = 0.95) -> EdgeField:
    px = rng.uniform(low, high, (height, width))
    py = rng.uniform(low, high, (height, width))
    px[:, -1] = 0.0
    py[-1, :] = 0.0
    return EdgeField(px, py)


def spaced_random_field(rng: np.random.Generator, height: int, width: int,
                        low: float = 0.02, high: float = 0.98) -> EdgeField:
    """Random field whose valid entries are pairwise separated (no near-ties).

    Values are a random permutation of an evenly spaced ladder with jitter of
    at most a quarter of the rung spacing, so every gap exceeds half a rung.
    """
    positions = valid_positions(height, width)
    n = len(positions)
    rung = (high - low) / n
    ladder = low + rung * (np.arange(n) + 0.5)
    values = rng.permutation(ladder) + rng.uniform(-0.25, 0.25, n) * rung
    arr = np.zeros((2, height, width))
    for v, pos in zip(values, positions):
        arr[pos] = v
    return EdgeField(arr[0], arr[1])


def _check_one(fn, pred: EdgeField, step: float) -> float:
    pos = valid_positions(*pred.shape)
    g = fn(pred).grad
    fd = finite_difference_grad(fn, pred, pos, step)
    return max_relative_error([g[p] for p in pos], fd)


def grad_check(rng: np.random.Generator, n_fields: int = 20, size: int = 16,
               conn_size: int = 12, step: float = 1e-5) -> dict[str, float]:
    """Max relative gradient error of every loss over random fields."""
    worst = {"bce": 0.0, "dice": 0.0, "conn": 0.0, "total": 0.0}
    for _ in range(n_fields):
        pred = random_field(rng, size, size)
        region = RegionMask(rng.random((size, size)) < 0.5)
        truth = node_to_edge_labels(region)
        for name, fn in (("bce", lambda q: bce_xy(truth, q)),
                         ("dice", lambda q: dice_xy(truth, q))):
            worst[name] = max(worst[name], _check_one(fn, pred, step))

        cpred = spaced_random_field(rng, conn_size, conn_size)
        cregion = RegionMask(rng.random((conn_size, conn_size)) < 0.6)
        worst["conn"] = max(worst["conn"], _check_one(
            lambda q: connectivity_loss(cregion, q), cpred, step))

        tpred = spaced_random_field(rng, size, size)
        tregion = RegionMask(rng.random((size, size)) < 0.6)
        ttruth = node_to_edge_labels(tregion)
        worst["total"] = max(worst["total"], _check_one(
            lambda q: total_loss(ttruth, tregion, q), tpred, step))
    return worst
