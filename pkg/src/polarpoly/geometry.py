"""Polygon value types and planar geometry primitives.

Cartesian polygons are stored as ``(n, 2)`` float arrays; polar polygons as
an origin plus parallel ``angles`` / ``radii`` arrays. All values are
immutable (arrays are flagged read-only) so they can be shared freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi
EPS = 1e-12


class GeometryError(ValueError):
    """Raised when a geometric precondition is violated."""


class Point(NamedTuple):
    x: float
    y: float


class PolarVertex(NamedTuple):
    angle: float
    radius: float


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CartesianPolygon:
    vertices: np.ndarray

    def __post_init__(self):
        v = _frozen(self.vertices)
        if v.ndim != 2 or v.shape[1] != 2:
            raise GeometryError(f"vertices must have shape (n, 2), got {v.shape}")
        if len(v) < 3:
            raise GeometryError(f"polygon needs length >= 3 vertices, got {len(v)}")
        if not np.all(np.isfinite(v)):
            raise GeometryError("vertex coordinates must be finite")
        step = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
        if np.any(step <= EPS):
            i = int(np.argmin(step))
            raise GeometryError(f"consecutive duplicate vertices at index {i}")
        object.__setattr__(self, "vertices", v)
        if _shoelace(v) == 0.0:
            raise GeometryError("degenerate polygon: zero signed area")

    def __len__(self):
        return len(self.vertices)

    def reversed(self) -> CartesianPolygon:
        return CartesianPolygon(self.vertices[::-1])

    def translated(self, dx: float, dy: float) -> CartesianPolygon:
        return CartesianPolygon(self.vertices + np.array([dx, dy]))


@dataclass(frozen=True, eq=False)
class PolarPolygon:
    """Origin plus ``k`` vertices sorted counter-clockwise by angle."""

    origin: Point
    angles: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        a = _frozen(self.angles)
        r = _frozen(self.radii)
        object.__setattr__(self, "origin", Point(float(self.origin[0]), float(self.origin[1])))
        if a.shape != r.shape or a.ndim != 1:
            raise GeometryError("angles and radii must be 1-d arrays of equal length")
        if len(a) < 3:
            raise GeometryError(f"polar polygon needs k >= 3 vertices, got {len(a)}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(r))):
            raise GeometryError("angles and radii must be finite")
        if np.any(r <= 0):
            raise GeometryError("radii must be strictly positive")
        if a[0] < 0 or a[-1] >= TWO_PI:
            raise GeometryError("angles must lie in [0, 2*pi)")
        if np.any(np.diff(a) <= 0):
            raise GeometryError("angles must be strictly increasing")
        object.__setattr__(self, "angles", a)
        object.__setattr__(self, "radii", r)

    @property
    def k(self) -> int:
        return len(self.angles)

    @property
    def vertices(self) -> list[PolarVertex]:
        return [PolarVertex(float(a), float(r)) for a, r in zip(self.angles, self.radii)]


def _shoelace(v: np.ndarray) -> float:
    # translate to the first vertex to limit cancellation
    d = v - v[0]
    x, y = d[:, 0], d[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def signed_area(poly: CartesianPolygon) -> float:
    """Shoelace area; positive for counter-clockwise vertex order."""
    return _shoelace(poly.vertices)


def geometric_centroid(poly: CartesianPolygon) -> Point:
    """Area-weighted centroid of a simple polygon."""
    v = poly.vertices
    base = v[0]
    d = v - base
    x, y = d[:, 0], d[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * np.sum(cross)
    if abs(area) <= EPS * EPS:
        raise GeometryError("centroid undefined for zero-area polygon")
    cx = np.sum((x + xn) * cross) / (6.0 * area)
    cy = np.sum((y + yn) * cross) / (6.0 * area)
    return Point(float(cx + base[0]), float(cy + base[1]))


def vertex_mean(poly: CartesianPolygon) -> Point:
    m = poly.vertices.mean(axis=0)
    return Point(float(m[0]), float(m[1]))


def bbox(poly: CartesianPolygon) -> tuple[Point, float, float]:
    """Return ``(center, width, height)`` of the axis-aligned envelope."""
    lo = poly.vertices.min(axis=0)
    hi = poly.vertices.max(axis=0)
    c = 0.5 * (lo + hi)
    w, h = hi - lo
    return Point(float(c[0]), float(c[1])), float(w), float(h)


def bbox_center(poly: CartesianPolygon) -> tuple[Point, float, float]:
    return bbox(poly)


def normalize_angle(a):
    """Map angles into ``[0, 2*pi)``."""
    out = np.mod(a, TWO_PI)
    # mod can round up to exactly 2*pi for tiny negative inputs
    return np.where(out >= TWO_PI, 0.0, out)


def _on_segment(px, py, a, b, tol=EPS) -> np.ndarray:
    ex, ey = b[0] - a[0], b[1] - a[1]
    L2 = ex * ex + ey * ey
    t = np.clip(((px - a[0]) * ex + (py - a[1]) * ey) / L2, 0.0, 1.0)
    dx = px - (a[0] + t * ex)
    dy = py - (a[1] + t * ey)
    return dx * dx + dy * dy <= tol * tol


def points_in_polygon(points, poly: CartesianPolygon) -> np.ndarray:
    """Vectorized even-odd test; points on the boundary count as inside."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    px, py = pts[:, 0], pts[:, 1]
    v = poly.vertices
    inside = np.zeros(len(pts), dtype=bool)
    boundary = np.zeros(len(pts), dtype=bool)
    n = len(v)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        crosses = (a[1] > py) != (b[1] > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = a[0] + (py - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
        inside ^= crosses & (px < xc)
        boundary |= _on_segment(px, py, a, b)
    return inside | boundary


def point_in_polygon(p, poly: CartesianPolygon) -> bool:
    return bool(points_in_polygon([p], poly)[0])


def to_polar(poly: CartesianPolygon, origin) -> PolarPolygon:
    """Express ``poly`` in polar form about ``origin``.

    Clockwise input is reversed to counter-clockwise first. The vertex
    sequence must then sweep exactly one turn with strictly increasing
    angle; otherwise the polygon is not star-shaped about ``origin`` and a
    ``GeometryError`` is raised instead of re-sorting the vertices.
    """
    o = np.asarray(origin, dtype=float)
    if not point_in_polygon(o, poly):
        raise GeometryError(f"origin {tuple(o)} lies outside the polygon")
    v = poly.vertices if signed_area(poly) > 0 else poly.vertices[::-1]
    d = v - o
    radii = np.hypot(d[:, 0], d[:, 1])
    if np.any(radii <= EPS):
        raise GeometryError("a vertex coincides with the origin")
    dn = np.roll(d, -1, axis=0)
    turn = np.arctan2(d[:, 0] * dn[:, 1] - d[:, 1] * dn[:, 0], np.sum(d * dn, axis=1))
    if np.any(turn <= 0) or abs(np.sum(turn) - TWO_PI) > 1e-9:
        raise GeometryError("polygon is not star-shaped about the origin (non-monotone angles)")
    angles = normalize_angle(np.arctan2(d[:, 1], d[:, 0]))
    start = int(np.argmin(angles))
    angles = np.roll(angles, -start)
    radii = np.roll(radii, -start)
    if np.any(np.diff(angles) <= 0):
        raise GeometryError("polygon is not star-shaped about the origin (non-monotone angles)")
    return PolarPolygon(Point(*o), angles, radii)


def to_cartesian(poly: PolarPolygon) -> CartesianPolygon:
    ox, oy = poly.origin
    xy = np.column_stack([ox + poly.radii * np.cos(poly.angles), oy + poly.radii * np.sin(poly.angles)])
    return CartesianPolygon(xy)
