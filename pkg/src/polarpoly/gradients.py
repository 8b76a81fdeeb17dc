"""Loss and gradient of the full decode -> resample -> loss pipeline.

``pipeline_terms`` is the single implementation; it runs on a plain vector
for values and on a :class:`~polarpoly.autodiff.DualGraph` input for
gradients. Discrete choices (ray bracketing, coincident-vertex rays, max/min
and smooth-L1 branches, signs under absolute values) are fixed at the
current point and gradients flow through the chosen branch only.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import autodiff as ad
from .codec import ANGLE_LOGIT_CLAMP, LOGIT_CLAMP, DecoderConfig, GridCell, decode_parts
from .geometry import TWO_PI, Point
from .losses import LossBreakdown, LossWeights, loss_terms
from .resample import DenseRadialProfile, bracket_rays, min_ray_vertex_gap, triangle_radii

# rays closer than this to a movable vertex make the input "near-singular"
SINGULAR_GAP = 1e-6


@dataclass(frozen=True)
class Target:
    """Encoded ground truth: origin, radial profile and envelope size."""

    origin: Point
    profile: DenseRadialProfile
    width: float
    height: float

    @property
    def m(self) -> int:
        return self.profile.m

    @property
    def phase(self) -> float:
        return self.profile.phase


class GradResult(NamedTuple):
    value: float
    grad: np.ndarray
    breakdown: LossBreakdown
    flagged: bool


def pipeline_terms(f, cell: GridCell, cfg: DecoderConfig, target: Target, w: LossWeights, circular=False):
    ox, oy, angles, radii = decode_parts(f, cell, cfg)
    pr = triangle_radii(angles, radii, target.m, target.phase)
    return loss_terms((ox, oy), pr, target.origin, target.profile.radii, target.width, target.height, w, circular)


def regression_loss_value(f, cell, cfg, target: Target, w: LossWeights = LossWeights(), circular=False) -> float:
    """Plain (unrecorded) total loss of a regression vector."""
    return float(pipeline_terms(np.asarray(f, dtype=float), cell, cfg, target, w, circular)[3])


def movable_angles(f, cfg: DecoderConfig) -> np.ndarray:
    """Decoded vertex angles that depend on the logits.

    The closing cumsum vertex is pinned at 2*pi, so a ray sitting on it is
    not a branch boundary.
    """
    _, _, angles, _ = decode_parts(np.asarray(f, dtype=float), GridCell(0, 0, 1, 1), cfg)
    return angles[:-1] if cfg.angle_mode == "cumsum" else angles


def is_near_singular(f, cfg: DecoderConfig, m: int, phase: float = 0.0) -> bool:
    return min_ray_vertex_gap(movable_angles(f, cfg), m, phase) <= SINGULAR_GAP


def evaluate_with_grad(
    f, cell: GridCell, cfg: DecoderConfig, target: Target, w: LossWeights = LossWeights(), circular=False
) -> GradResult:
    f = np.asarray(f, dtype=float)
    g = ad.DualGraph()
    x = g.variable(f)
    lo, li, ls, total = pipeline_terms(x, cell, cfg, target, w, circular)
    value = float(ad.value(total))
    if not np.isfinite(value):
        raise FloatingPointError("non-finite loss value")
    grad = g.grad(total, x)
    if not np.all(np.isfinite(grad)):
        raise FloatingPointError("non-finite gradient")
    breakdown = LossBreakdown(float(ad.value(lo)), float(ad.value(li)), float(ad.value(ls)), value)
    return GradResult(value, grad, breakdown, is_near_singular(f, cfg, target.m, target.phase))


def grad_regression_loss(f, cell, cfg, target: Target, w: LossWeights = LossWeights(), circular=False):
    """``(total loss, d total / d f)`` for a regression vector."""
    r = evaluate_with_grad(f, cell, cfg, target, w, circular)
    return r.value, r.grad


def branch_signature(f, cell, cfg: DecoderConfig, target: Target, circular=False) -> bytes:
    """Digest of every discrete choice the pipeline makes at ``f``.

    Two points with equal signatures lie on the same smooth piece.
    """
    f = np.asarray(f, dtype=float)
    ox, oy, angles, radii = decode_parts(f, cell, cfg)
    ia, _, _, _, _ = bracket_rays(angles, target.m, target.phase)
    pr = triangle_radii(angles, radii, target.m, target.phase)
    gr = target.profile.radii
    if circular:
        d1 = pr - np.roll(pr, 1)
        d2 = np.roll(pr, -1) - 2.0 * pr + np.roll(pr, 1)
    else:
        d1 = np.diff(pr)
        d2 = pr[2:] - 2.0 * pr[1:-1] + pr[:-2]
    k = cfg.k
    parts = [
        ia,
        min_ray_vertex_gap(movable_angles(f, cfg), target.m, target.phase) <= 1e-12,
        pr >= gr,
        np.sign(d1),
        np.sign(d2),
        np.array([abs(ox - target.origin.x) < 1.0, abs(oy - target.origin.y) < 1.0]),
        np.abs(f[: 2 + k]) <= LOGIT_CLAMP,
        np.abs(f[2 + k :]) <= ANGLE_LOGIT_CLAMP,
    ]
    h = hashlib.sha1()
    for p in parts:
        h.update(np.ascontiguousarray(np.asarray(p, dtype=np.int64)).tobytes())
    return h.digest()


def branch_margin(f, cell, cfg: DecoderConfig, target: Target) -> float:
    """Distance of ``f``'s pipeline state to the nearest branch boundary.

    Considers ray/vertex coincidence (radians), max/min ties and the smooth-L1
    kink (plane units).
    """
    f = np.asarray(f, dtype=float)
    ox, oy, angles, radii = decode_parts(f, cell, cfg)
    pr = triangle_radii(angles, radii, target.m, target.phase)
    return float(
        min(
            min_ray_vertex_gap(movable_angles(f, cfg), target.m, target.phase),
            np.min(np.abs(pr - target.profile.radii)),
            abs(abs(ox - target.origin.x) - 1.0),
            abs(abs(oy - target.origin.y) - 1.0),
        )
    )


@dataclass
class GradCheckReport:
    trials: int
    components: int
    excluded: int
    max_rel_error: float
    max_abs_error_small: float
    failures: int
    rejected_inputs: int

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "components": self.components,
            "excluded": self.excluded,
            "rejected_inputs": self.rejected_inputs,
            "max_rel_error": self.max_rel_error,
            "max_abs_error_small": self.max_abs_error_small,
            "failures": self.failures,
            "passed": self.passed,
        }


def random_gradcheck_case(rng: np.random.Generator, k: int, m: int, angle_mode="cumsum"):
    """Random target polygon, grid cell, decoder config and regression vector."""
    from .codec import encode_ground_truth
    from .geometry import CartesianPolygon, bbox

    n = int(rng.integers(5, 16))
    ta = np.sort(rng.uniform(0, TWO_PI, n))
    ta = ta[np.diff(np.append(ta, ta[0] + TWO_PI)) > 1e-3] if n > 3 else ta
    tr = rng.uniform(0.6, 1.4, len(ta)) * rng.uniform(0.5, 3.0)
    c = rng.uniform(-5, 5, 2)
    verts = np.column_stack([c[0] + tr * np.cos(ta), c[1] + tr * np.sin(ta)])
    target_poly = CartesianPolygon(verts)
    origin, profile = encode_ground_truth(target_poly, m)
    center, tw, th = bbox(target_poly)
    target = Target(origin, profile, tw, th)
    cell = GridCell(center.x - tw / 2, center.y - th / 2, tw, th)
    cfg = DecoderConfig(k=k, mu=0.25 * (tw + th), angle_mode=angle_mode)
    f = np.concatenate([rng.normal(0, 0.5, 2), rng.normal(0, 0.3, k), rng.normal(0, 0.3, k)])
    return target_poly, cell, cfg, target, f


def gradcheck(
    k: int,
    m: int,
    trials: int = 100,
    eps: float = 1e-5,
    tolerance: float = 1e-4,
    abs_tolerance: float = 1e-7,
    small: float = 1e-3,
    seed: int = 0,
    weights: LossWeights = LossWeights(),
    angle_mode: str = "cumsum",
    margin: float = 1e-6,
) -> GradCheckReport:
    """Compare recorded-graph gradients against central differences.

    Inputs within ``margin`` of a branch boundary are redrawn; gradient
    components whose difference stencil straddles a branch boundary are
    excluded and counted.
    """
    rng = np.random.default_rng(seed)
    done = rejected = components = excluded = failures = 0
    max_rel = max_abs = 0.0
    from .geometry import GeometryError

    while done < trials:
        try:
            _, cell, cfg, target, f = random_gradcheck_case(rng, k, m, angle_mode)
            if branch_margin(f, cell, cfg, target) <= margin:
                rejected += 1
                continue
            res = evaluate_with_grad(f, cell, cfg, target, weights)
        except GeometryError:
            rejected += 1
            continue
        sig = branch_signature(f, cell, cfg, target)

        def fn(x):
            return regression_loss_value(x, cell, cfg, target, weights)

        for j in range(f.size):
            xp, xm = f.copy(), f.copy()
            xp[j] += eps
            xm[j] -= eps
            try:
                same = branch_signature(xp, cell, cfg, target) == sig == branch_signature(xm, cell, cfg, target)
            except GeometryError:
                same = False
            if not same:
                excluded += 1
                continue
            fd = (fn(xp) - fn(xm)) / (2.0 * eps)
            err = abs(res.grad[j] - fd)
            components += 1
            if abs(fd) < small:
                max_abs = max(max_abs, err)
                if err >= abs_tolerance and err >= tolerance * abs(fd):
                    failures += 1
            else:
                rel = err / abs(fd)
                max_rel = max(max_rel, rel)
                if rel >= tolerance:
                    failures += 1
        done += 1
    return GradCheckReport(done, components, excluded, max_rel, max_abs, failures, rejected)
