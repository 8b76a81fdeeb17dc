"""Desk-scale comparisons shared by ``scripts/`` and the acceptance tests."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .evaluate import polygon_iou
from .fit import FitConfig, FitDivergence, fit
from .geometry import GeometryError, to_cartesian
from .shapes import random_lshape

FIXED_KS = (12, 16, 24, 32, 48, 64, 96, 128)


def fit_iou(target, cfg: FitConfig, grid: int = 512) -> float:
    """Rasterized IoU of the fitted polygon; 0 when the fit cannot run."""
    try:
        poly, _ = fit(target, cfg)
    except (GeometryError, FitDivergence):
        return 0.0
    return polygon_iou(to_cartesian(poly), target, grid)


def fixed_vs_deformable(target, k: int = 12, fixed_ks=FIXED_KS, base: FitConfig = FitConfig(), margin=0.02):
    """Deformable IoU at ``k`` and the fixed-ray IoU for each ray budget.

    ``crossover`` is the smallest fixed budget whose IoU comes within
    ``margin`` of the deformable result (``None`` if none does).
    """
    deformable = fit_iou(target, replace(base, k=k, angle_mode="cumsum"))
    fixed = {kk: fit_iou(target, replace(base, k=kk, angle_mode="fixed", m=max(base.m, kk))) for kk in fixed_ks}
    crossover = next((kk for kk in sorted(fixed) if fixed[kk] >= deformable - margin), None)
    return {"deformable": deformable, "fixed": fixed, "crossover": crossover}


def origin_ablation(n: int = 20, seed: int = 0, base: FitConfig = FitConfig()):
    """Per-mode IoUs over ``n`` random L-shapes; failed fits score 0."""
    rng = np.random.default_rng(seed)
    shapes = [random_lshape(rng) for _ in range(n)]
    out = {}
    for mode in ("centroid", "bbox", "vertex_mean"):
        out[mode] = [fit_iou(s, replace(base, origin_mode=mode)) for s in shapes]
    return shapes, out
