"""Dense resampling of polygons along uniformly spaced rays.

Two routes compute the same radial profile:

* triangle approach: for polar polygons with sorted angles, each ray is
  bracketed by two neighbouring vertices and the hit point follows from the
  similar-triangle length ratio. Differentiable, used for predictions.
* vector approach: parametric ray/segment intersection against every edge.
  Order-free and valid for concave outlines, used for targets.

``resample_oracle`` solves each ray/segment pair as an explicit 2x2 linear
system with Cramer's rule and exists only to check the other two.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .geometry import EPS, TWO_PI, CartesianPolygon, GeometryError, PolarPolygon, Point

PARALLEL_TOL = 1e-12
# slack on the segment parameter so a ray through a vertex cannot slip
# between its two edges by rounding
HIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DenseRadialProfile:
    origin: Point
    radii: np.ndarray
    phase: float = 0.0

    def __post_init__(self):
        r = np.array(self.radii, dtype=float)
        r.setflags(write=False)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "origin", Point(float(self.origin[0]), float(self.origin[1])))
        if r.ndim != 1 or len(r) < 8:
            raise GeometryError(f"profile needs m >= 8 radii, got shape {r.shape}")
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise GeometryError("profile radii must be finite and strictly positive")

    @property
    def m(self) -> int:
        return len(self.radii)

    @property
    def angles(self) -> np.ndarray:
        return ray_angles(self.m, self.phase)

    def to_polygon(self) -> CartesianPolygon:
        """Polygon with one vertex per raypoint."""
        a = self.angles
        return CartesianPolygon(
            np.column_stack([self.origin.x + self.radii * np.cos(a), self.origin.y + self.radii * np.sin(a)])
        )


@dataclass(frozen=True)
class RaySegmentHit:
    point: Point
    t1: float
    t2: float
    segment_index: int = -1


def ray_angles(m: int, phase: float = 0.0) -> np.ndarray:
    """Ray ``j`` points at ``phase + 2*pi*j/m``."""
    return phase + TWO_PI * np.arange(m) / m


# --- triangle approach -------------------------------------------------------


def bracket_rays(vertex_angles: np.ndarray, m: int, phase: float = 0.0):
    """Bracketing vertex pair for every ray by one merge over both sorted lists.

    Returns ``(ia, ib, theta, alpha_shift, beta_shift)`` with ``theta`` the
    ray angles reduced to [0, 2*pi). For ray ``j`` the angular offsets are
    ``alpha = theta_j - a[ia] + alpha_shift`` and
    ``beta = a[ib] - theta_j + beta_shift``. The shifts carry the 2*pi
    unwrapping of the closing pair (last vertex, first vertex).
    """
    va = np.asarray(vertex_angles, dtype=float)
    k = len(va)
    theta = np.mod(ray_angles(m, phase), TWO_PI)
    theta[theta >= TWO_PI] = 0.0
    order = np.argsort(theta, kind="stable")
    ia = np.empty(m, dtype=np.intp)
    alpha_shift = np.zeros(m)
    beta_shift = np.zeros(m)
    i = -1  # index of the last vertex with angle <= current ray
    for j in order.tolist():
        t = theta[j]
        while i + 1 < k and va[i + 1] <= t:
            i += 1
        if i < 0:
            ia[j] = k - 1
            alpha_shift[j] = TWO_PI
        else:
            ia[j] = i
            if i == k - 1:
                beta_shift[j] = TWO_PI
    ib = (ia + 1) % k
    return ia, ib, theta, alpha_shift, beta_shift


def triangle_radii(angles, radii, m: int, phase: float = 0.0):
    """Raypoint distances of a polar polygon, origin-relative.

    ``angles`` and ``radii`` may be arrays or graph nodes; the bracketing is
    a discrete choice taken from the current values.
    """
    av = np.asarray(ad.value(angles))
    ia, ib, theta, sa_shift, sb_shift = bracket_rays(av, m, phase)
    gaps = np.diff(np.append(av, av[0] + TWO_PI))
    if np.any(gaps >= math.pi):
        raise GeometryError("angular gap >= pi between neighbouring vertices: origin not interior")
    a_a = ad.take(angles, ia)
    a_b = ad.take(angles, ib)
    r_a = ad.take(radii, ia)
    r_b = ad.take(radii, ib)
    alpha = (theta + sa_shift) - a_a
    beta = (a_b + sb_shift) - theta
    hit_a = ad.value(alpha) <= EPS
    hit_b = (ad.value(beta) <= EPS) & ~hit_a
    singular = hit_a | hit_b
    # keep the ratio finite on coincident rays; those rays take the vertex radius
    safe_alpha = ad.where(singular, 0.5, alpha)
    safe_beta = ad.where(singular, 0.5, beta)
    w = (r_a * ad.sin(safe_alpha)) / (r_b * ad.sin(safe_beta))
    ax, ay = r_a * ad.cos(a_a), r_a * ad.sin(a_a)
    bx, by = r_b * ad.cos(a_b), r_b * ad.sin(a_b)
    px = (ax + w * bx) / (1.0 + w)
    py = (ay + w * by) / (1.0 + w)
    dist = ad.sqrt(px * px + py * py)
    return ad.where(hit_a, r_a, ad.where(hit_b, r_b, dist))


def resample_triangle(poly: PolarPolygon, m: int, phase: float = 0.0) -> DenseRadialProfile:
    return DenseRadialProfile(poly.origin, triangle_radii(poly.angles, poly.radii, m, phase), phase)


def min_ray_vertex_gap(vertex_angles, m: int, phase: float = 0.0) -> float:
    """Smallest angular distance between any ray and any of the given vertex angles."""
    va = np.mod(np.asarray(vertex_angles, dtype=float), TWO_PI)
    if va.size == 0:
        return math.inf
    step = TWO_PI / m
    off = np.mod(va - phase, step)
    return float(np.min(np.minimum(off, step - off)))


def resample_batch(polys, m: int, phase: float = 0.0, workers: int | None = None) -> list[DenseRadialProfile]:
    """Element-wise ``resample_triangle``; optionally spread over threads.

    Results do not depend on ``workers``. A failing element is reported as
    ``GeometryError`` carrying its index.
    """

    def one(item):
        idx, p = item
        try:
            return resample_triangle(p, m, phase)
        except GeometryError as exc:
            raise GeometryError(f"polygon {idx}: {exc}") from exc

    items = list(enumerate(polys))
    if not workers or workers <= 1 or len(items) < 2:
        return [one(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, items))


# --- vector approach ---------------------------------------------------------


def ray_segment_intersect(o, ray_angle: float, a, b) -> RaySegmentHit | None:
    """Intersect the ray ``o + t1*(cos, sin)`` with segment ``a + t2*(b - a)``.

    With ``v1`` the ray direction, ``v2 = b - a``, ``v3`` the left normal of
    ``v1`` and ``v4 = o - a``::

        t1 = (v2 x v4) / (v2 . v3)      t2 = (v4 . v3) / (v2 . v3)

    The cross product is kept signed so hits behind the origin are rejected.
    """
    ox, oy = float(o[0]), float(o[1])
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    v2x, v2y = bx - ax, by - ay
    if math.hypot(v2x, v2y) <= EPS:
        raise GeometryError("degenerate segment")
    v1x, v1y = math.cos(ray_angle), math.sin(ray_angle)
    v3x, v3y = -v1y, v1x
    v4x, v4y = ox - ax, oy - ay
    den = v2x * v3x + v2y * v3y
    if abs(den) < PARALLEL_TOL:
        return None
    t1 = (v2x * v4y - v2y * v4x) / den
    t2 = (v4x * v3x + v4y * v3y) / den
    if t1 < 0.0 or t2 < -HIT_TOL or t2 > 1.0 + HIT_TOL:
        return None
    return RaySegmentHit(Point(ox + t1 * v1x, oy + t1 * v1y), t1, min(max(t2, 0.0), 1.0))


def _vector_t1(poly: CartesianPolygon, origin, theta: np.ndarray) -> np.ndarray:
    """Outermost hit distance per ray; NaN where a ray misses every edge."""
    v = poly.vertices
    a = v[None, :, :]
    b = np.roll(v, -1, axis=0)[None, :, :]
    v1x, v1y = np.cos(theta)[:, None], np.sin(theta)[:, None]
    v2x, v2y = b[..., 0] - a[..., 0], b[..., 1] - a[..., 1]
    v3x, v3y = -v1y, v1x
    v4x, v4y = origin[0] - a[..., 0], origin[1] - a[..., 1]
    den = v2x * v3x + v2y * v3y
    ok = np.abs(den) >= PARALLEL_TOL
    safe = np.where(ok, den, 1.0)
    t1 = (v2x * v4y - v2y * v4x) / safe
    t2 = (v4x * v3x + v4y * v3y) / safe
    valid = ok & (t1 >= 0.0) & (t2 >= -HIT_TOL) & (t2 <= 1.0 + HIT_TOL)
    t1 = np.where(valid, t1, -np.inf)
    best = t1.max(axis=1)
    return np.where(np.isfinite(best), best, np.nan)


def _profile_from_t1(t1, origin, m, phase, what):
    if np.any(np.isnan(t1)):
        j = int(np.flatnonzero(np.isnan(t1))[0])
        raise GeometryError(f"{what}: ray {j} has no boundary crossing (origin outside polygon?)")
    if np.any(t1 <= EPS):
        raise GeometryError(f"{what}: origin lies on the polygon boundary")
    return DenseRadialProfile(Point(*origin), t1, phase)


def resample_vector(poly: CartesianPolygon, origin, m: int, phase: float = 0.0) -> DenseRadialProfile:
    """Outermost boundary crossing along each ray, any vertex order."""
    o = (float(origin[0]), float(origin[1]))
    t1 = _vector_t1(poly, o, ray_angles(m, phase))
    return _profile_from_t1(t1, o, m, phase, "vector resampling")


def resample_oracle(poly: CartesianPolygon, origin, m: int, phase: float = 0.0) -> DenseRadialProfile:
    """Brute-force reference: Cramer's rule on ``o + t1*d = a + t2*(b - a)``.

    Written independently of the vector approach; O(k*m), tests only.
    """
    o = np.array([float(origin[0]), float(origin[1])])
    theta = ray_angles(m, phase)
    d = np.stack([np.cos(theta), np.sin(theta)], axis=-1)[:, None, :]  # (m, 1, 2)
    a = poly.vertices[None, :, :]
    e = np.roll(poly.vertices, -1, axis=0)[None, :, :] - a  # (1, k, 2)
    rhs = a - o  # t1*d - t2*e = a - o
    # columns: [d, -e]
    det = d[..., 0] * (-e[..., 1]) - (-e[..., 0]) * d[..., 1]
    det1 = rhs[..., 0] * (-e[..., 1]) - (-e[..., 0]) * rhs[..., 1]
    det2 = d[..., 0] * rhs[..., 1] - rhs[..., 0] * d[..., 1]
    scale = np.hypot(e[..., 0], e[..., 1])
    solvable = np.abs(det) > PARALLEL_TOL * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = det1 / det
        t2 = det2 / det
    good = solvable & (t1 >= 0.0) & (t2 >= -HIT_TOL) & (t2 <= 1.0 + HIT_TOL)
    t1 = np.where(good, t1, -np.inf).max(axis=1)
    t1 = np.where(np.isfinite(t1), t1, np.nan)
    return _profile_from_t1(t1, o, m, phase, "oracle resampling")
