"""Rasterized polygon IoU, optimal one-to-one matching and P/R/F1."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import CartesianPolygon


def lattice(polys, grid: int, pad: float = 0.02):
    """Pixel-center coordinates of a ``grid x grid`` lattice over the padded union bbox."""
    pts = np.concatenate([p.vertices for p in polys])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = hi - lo
    lo = lo - pad * span
    hi = hi + pad * span
    xs = lo[0] + (np.arange(grid) + 0.5) * (hi[0] - lo[0]) / grid
    ys = lo[1] + (np.arange(grid) + 0.5) * (hi[1] - lo[1]) / grid
    return xs, ys


def rasterize(poly: CartesianPolygon, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Even-odd fill sampled at pixel centers, one scanline per row.

    Each edge crossing a row toggles parity from its crossing column onward;
    a cumulative xor along the row then gives the fill.
    """
    v = poly.vertices
    a = v
    b = np.roll(v, -1, axis=0)
    ny, nx = len(ys), len(xs)
    toggles = np.zeros((ny, nx + 1), dtype=np.int32)
    yy = ys[:, None]
    crosses = (a[None, :, 1] > yy) != (b[None, :, 1] > yy)
    dy = np.where(a[:, 1] == b[:, 1], 1.0, b[:, 1] - a[:, 1])
    xc = a[None, :, 0] + (yy - a[None, :, 1]) * (b[None, :, 0] - a[None, :, 0]) / dy[None, :]
    # first column whose center lies strictly right of the crossing
    col = np.searchsorted(xs, xc, side="right")
    rows, edges = np.nonzero(crosses)
    np.add.at(toggles, (rows, col[rows, edges]), 1)
    return (np.cumsum(toggles[:, :nx], axis=1) & 1).astype(bool)


def polygon_iou(a: CartesianPolygon, b: CartesianPolygon, grid: int = 512) -> float:
    if grid < 64:
        raise ValueError(f"grid >= 64 required, got {grid}")
    xs, ys = lattice([a, b], grid)
    ma = rasterize(a, xs, ys)
    mb = rasterize(b, xs, ys)
    union = np.count_nonzero(ma | mb)
    if union == 0:
        raise ValueError("both polygons are empty on the lattice")
    return np.count_nonzero(ma & mb) / union


def iou_matrix(preds, gts, grid: int = 512) -> np.ndarray:
    out = np.zeros((len(preds), len(gts)))
    for i, p in enumerate(preds):
        for j, g in enumerate(gts):
            out[i, j] = polygon_iou(p, g, grid)
    return out


def hungarian_assign(iou: np.ndarray) -> list[tuple[int, int]]:
    """One-to-one assignment maximizing total IoU; rectangular matrices leave extras unmatched."""
    iou = np.asarray(iou, dtype=float)
    if iou.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if iou.size == 0:
        return []
    if not np.all(np.isfinite(iou)):
        raise ValueError("IoU matrix entries must be finite")
    rows, cols = linear_sum_assignment(iou, maximize=True)
    return [(int(i), int(j)) for i, j in zip(rows, cols)]


@dataclass
class MatchReport:
    assignments: list[tuple[int, int, float]] = field(default_factory=list)
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    iou_threshold: float = 0.5
    empty: bool = False

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "iou_threshold": self.iou_threshold,
            "assignments": [[i, j, iou] for i, j, iou in self.assignments],
        }


def evaluate(preds, gts, iou_threshold: float = 0.5, grid: int = 512) -> MatchReport:
    """Match predictions to ground truths and score them.

    Pairs below the threshold are dropped after assignment; duplicates of one
    object count as false positives.
    """
    if not 0 < iou_threshold < 1:
        raise ValueError("iou_threshold must lie in (0, 1)")
    if not preds or not gts:
        return MatchReport(iou_threshold=iou_threshold, empty=True)
    mat = iou_matrix(preds, gts, grid)
    kept = [(i, j, float(mat[i, j])) for i, j in hungarian_assign(mat) if mat[i, j] >= iou_threshold]
    tp = len(kept)
    p = tp / len(preds)
    r = tp / len(gts)
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return MatchReport(kept, p, r, f1, iou_threshold)
