"""Regression-vector decoding and ground-truth encoding.

Vector layout (length ``2 + 2k``)::

    f[0:2]        origin logits
    f[2:2+k]      radius logits
    f[2+k:2+2k]   angle logits

The decoders are written against :mod:`polarpoly.autodiff` so the same code
produces plain arrays or recorded graph nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import autodiff as ad
from .geometry import (
    TWO_PI,
    CartesianPolygon,
    GeometryError,
    PolarPolygon,
    Point,
    geometric_centroid,
    point_in_polygon,
)

# exp() guard; far outside any range where gradients are checked
LOGIT_CLAMP = 50.0
# tighter for angles: wider logit spreads round adjacent angles together
ANGLE_LOGIT_CLAMP = 15.0
# stored angle of the closing vertex, keeping angles inside [0, 2*pi)
LAST_ANGLE = float(np.nextafter(TWO_PI, 0.0))

AngleMode = Literal["cumsum", "bin_offset"]


@dataclass(frozen=True)
class GridCell:
    gx: float
    gy: float
    sx: float
    sy: float

    def __post_init__(self):
        if not (self.sx > 0 and self.sy > 0):
            raise ValueError("grid cell size must be positive")


@dataclass(frozen=True)
class DecoderConfig:
    k: int
    mu: float = 1.0
    angle_mode: AngleMode = "cumsum"

    def __post_init__(self):
        if self.k < 3:
            raise ValueError(f"k >= 3 required, got {self.k}")
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.angle_mode not in ("cumsum", "bin_offset"):
            raise ValueError(f"unknown angle mode {self.angle_mode!r}")

    @property
    def size(self) -> int:
        return 2 + 2 * self.k


def _check_finite(f):
    if not np.all(np.isfinite(ad.value(f))):
        raise FloatingPointError("regression values must be finite")


def decode_origin(f0, f1, cell: GridCell):
    """Origin = cell corner + cell size * sigmoid(logit), per axis."""
    ox = cell.gx + cell.sx * ad.sigmoid(ad.clip(f0, -LOGIT_CLAMP, LOGIT_CLAMP))
    oy = cell.gy + cell.sy * ad.sigmoid(ad.clip(f1, -LOGIT_CLAMP, LOGIT_CLAMP))
    return ox, oy


def decode_radii(f, mu: float):
    if not mu > 0:
        raise ValueError("mu must be positive")
    _check_finite(f)
    r = mu * ad.exp(ad.clip(f, -LOGIT_CLAMP, LOGIT_CLAMP))
    if not np.all(np.isfinite(ad.value(r))):
        raise FloatingPointError("radius decoding overflowed")
    return r


def decode_angles_cumsum(f):
    """Normalized cumulative softmax; the last angle is pinned just below 2*pi."""
    _check_finite(f)
    # shift by the max (softmax is shift invariant), then floor the spread so
    # the smallest weight cannot vanish against the largest
    top = float(np.max(ad.value(f)))
    e = ad.exp(ad.clip(f - top, -2.0 * ANGLE_LOGIT_CLAMP, 0.0))
    c = ad.cumsum(e)
    a = TWO_PI * c[:-1] / c[-1]
    return ad.concatenate([a, np.array([LAST_ANGLE])])


def decode_angles_bin_offset(f):
    """One vertex per uniform angular bin, offset by sigmoid(logit)."""
    _check_finite(f)
    k = len(ad.value(f))
    idx = np.arange(k, dtype=float)
    return (TWO_PI / k) * (idx + ad.sigmoid(ad.clip(f, -ANGLE_LOGIT_CLAMP, ANGLE_LOGIT_CLAMP)))


def decode_parts(f, cell: GridCell, cfg: DecoderConfig):
    """Decode to ``(ox, oy, angles, radii)`` (arrays or graph nodes)."""
    if len(ad.value(f)) != cfg.size:
        raise ValueError(f"expected vector of length {cfg.size} for k={cfg.k}, got {len(ad.value(f))}")
    _check_finite(f)
    k = cfg.k
    ox, oy = decode_origin(f[0], f[1], cell)
    radii = decode_radii(f[2 : 2 + k], cfg.mu)
    if cfg.angle_mode == "cumsum":
        angles = decode_angles_cumsum(f[2 + k : 2 + 2 * k])
    else:
        angles = decode_angles_bin_offset(f[2 + k : 2 + 2 * k])
    return ox, oy, angles, radii


def decode(f, cell: GridCell, cfg: DecoderConfig) -> PolarPolygon:
    ox, oy, angles, radii = decode_parts(np.asarray(f, dtype=float), cell, cfg)
    return PolarPolygon(Point(float(ox), float(oy)), angles, radii)


def encode_ground_truth(gt: CartesianPolygon, m: int, phase: float = 0.0, origin=None):
    """Origin and dense radial profile of a target polygon.

    The origin defaults to the geometric centroid and must lie inside the
    polygon; the profile comes from the order-free vector resampler, so the
    polygon need not be star-shaped.
    """
    from .resample import resample_vector

    if m < 8:
        raise ValueError(f"m >= 8 required, got {m}")
    o = geometric_centroid(gt) if origin is None else Point(*origin)
    if not point_in_polygon(o, gt):
        raise GeometryError(f"origin ({o.x:.6g}, {o.y:.6g}) lies outside the target polygon")
    return o, resample_vector(gt, o, m, phase)


def uniform_angle_logits(k: int) -> np.ndarray:
    """Angle logits decoding to evenly spaced vertices (all zeros)."""
    return np.zeros(k)


def logit(p: float) -> float:
    return math.log(p / (1.0 - p))
