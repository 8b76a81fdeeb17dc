"""Parametric demo targets, all generated in code."""

from __future__ import annotations

import numpy as np

from .geometry import TWO_PI, CartesianPolygon


def star(points: int = 5, outer: float = 1.0, inner: float = 0.45, center=(0.0, 0.0), rotation: float = np.pi / 2):
    """Regular star with ``2 * points`` vertices, counter-clockwise."""
    n = 2 * points
    a = rotation + TWO_PI * np.arange(n) / n
    r = np.where(np.arange(n) % 2 == 0, outer, inner)
    return CartesianPolygon(np.column_stack([center[0] + r * np.cos(a), center[1] + r * np.sin(a)]))


def regular_polygon(k: int, radius: float = 1.0, center=(0.0, 0.0), rotation: float = 0.0):
    a = rotation + TWO_PI * np.arange(k) / k
    return CartesianPolygon(np.column_stack([center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)]))


def lshape(width: float = 2.0, height: float = 2.0, arm_x: float = 1.0, arm_y: float = 1.0, origin=(0.0, 0.0)):
    """L with a horizontal arm of thickness ``arm_y`` and a vertical arm of thickness ``arm_x``."""
    x0, y0 = origin
    v = [(0, 0), (width, 0), (width, arm_y), (arm_x, arm_y), (arm_x, height), (0, height)]
    return CartesianPolygon(np.array(v, dtype=float) + [x0, y0])


def zigzag(teeth: int = 3, length: float = 6.0, thickness: float = 1.0, skew: float = 1.0, depth: float = 0.12):
    """Crosswalk-like band: long skewed strip whose top edge is a saw-tooth.

    The default proportions keep the outline star-shaped about its centroid,
    so its radial profile describes it exactly.
    """
    xs = np.linspace(-length / 2, length / 2, 2 * teeth + 1)
    top = [(x + skew, thickness / 2 - (depth if i % 2 else 0.0)) for i, x in enumerate(xs)]
    verts = [(-length / 2 - skew, -thickness / 2), (length / 2 - skew, -thickness / 2)] + top[::-1]
    return CartesianPolygon(np.array(verts, dtype=float))


def random_lshape(rng: np.random.Generator) -> CartesianPolygon:
    w, h = rng.uniform(1.5, 3.0, 2)
    ax = rng.uniform(0.35, 0.6) * w
    ay = rng.uniform(0.35, 0.6) * h
    return lshape(w, h, ax, ay, origin=tuple(rng.uniform(-2, 2, 2)))


BUILTIN = {
    "star": lambda: star(),
    "lshape": lambda: lshape(),
    "crosswalk": lambda: zigzag(),
}
