"""Gradient-descent deformation of a polar polygon onto a target shape."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from .codec import DecoderConfig, GridCell, decode, encode_ground_truth
from .geometry import CartesianPolygon, GeometryError, PolarPolygon, Point, bbox, geometric_centroid, vertex_mean
from .gradients import Target, evaluate_with_grad
from .losses import LossBreakdown, LossWeights

log = logging.getLogger(__name__)

ORIGIN_MODES = ("centroid", "bbox", "vertex_mean")
ANGLE_MODES = ("cumsum", "bin_offset", "fixed")


class FitDivergence(FloatingPointError):
    pass


@dataclass(frozen=True)
class FitConfig:
    k: int = 24
    m: int = 360
    max_iters: int = 500
    optimizer: Literal["sgd", "adam"] = "adam"
    learning_rate: float = 0.05
    weights: LossWeights = field(default_factory=LossWeights)
    angle_mode: Literal["cumsum", "bin_offset", "fixed"] = "cumsum"
    origin_mode: Literal["centroid", "bbox", "vertex_mean"] = "centroid"
    seed: int = 0
    convergence_tol: float = 0.0
    phase: float = 0.0
    snapshot_iters: tuple[int, ...] = ()
    init_noise: float = 0.0
    circular_smoothness: bool = False
    mu: float | None = None
    lr_schedule: Literal["constant", "cosine"] = "cosine"
    lr_floor: float = 0.02

    def __post_init__(self):
        if self.k < 3:
            raise ValueError(f"k >= 3 required, got {self.k}")
        if self.m < self.k:
            raise ValueError(f"m >= k required, got m={self.m}, k={self.k}")
        if self.m < 8:
            raise ValueError(f"m >= 8 required, got {self.m}")
        if self.max_iters < 1:
            raise ValueError("max_iters >= 1 required")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if not self.learning_rate > 0:
            raise ValueError("learning rate must be positive")
        if self.angle_mode not in ANGLE_MODES:
            raise ValueError(f"unknown angle mode {self.angle_mode!r}")
        if self.origin_mode not in ORIGIN_MODES:
            raise ValueError(f"unknown origin mode {self.origin_mode!r}")
        if self.lr_schedule not in ("constant", "cosine"):
            raise ValueError(f"unknown lr schedule {self.lr_schedule!r}")
        if self.convergence_tol < 0:
            raise ValueError("convergence_tol must be non-negative")

    def lr_at(self, it: int) -> float:
        """Step size for the update following iteration ``it`` (1-based)."""
        if self.lr_schedule == "constant" or self.max_iters < 2:
            return self.learning_rate
        frac = (it - 1) / (self.max_iters - 1)
        scale = self.lr_floor + (1.0 - self.lr_floor) * 0.5 * (1.0 + math.cos(math.pi * frac))
        return self.learning_rate * scale

    @property
    def n_params(self) -> int:
        return 2 + self.k if self.angle_mode == "fixed" else 2 + 2 * self.k


class IterRecord(NamedTuple):
    iteration: int
    loss: LossBreakdown


@dataclass
class FitTrace:
    records: list[IterRecord] = field(default_factory=list)
    snapshots: dict[int, PolarPolygon] = field(default_factory=dict)
    n_params: int = 0
    flagged_iters: list[int] = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.records)

    @property
    def totals(self) -> np.ndarray:
        return np.array([r.loss.total for r in self.records])


class AdamState(NamedTuple):
    m: np.ndarray
    v: np.ndarray
    t: int

    @classmethod
    def zeros(cls, n: int) -> AdamState:
        return cls(np.zeros(n), np.zeros(n), 0)


def adam_step(params, grad, state: AdamState, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
    """One bias-corrected Adam update; returns ``(params, state)``."""
    t = state.t + 1
    m = beta1 * state.m + (1.0 - beta1) * grad
    v = beta2 * state.v + (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    return params - lr * m_hat / (np.sqrt(v_hat) + eps), AdamState(m, v, t)


def sgd_step(params, grad, lr: float):
    return params - lr * grad


def target_origin(target: CartesianPolygon, mode: str) -> Point:
    if mode == "centroid":
        return geometric_centroid(target)
    if mode == "bbox":
        return bbox(target)[0]
    if mode == "vertex_mean":
        return vertex_mean(target)
    raise ValueError(f"unknown origin mode {mode!r}")


@dataclass(frozen=True)
class FitProblem:
    """Everything fixed for one fit: encoded target, cell and decoder."""

    target: Target
    cell: GridCell
    decoder: DecoderConfig
    fixed: bool

    def expand(self, params: np.ndarray) -> np.ndarray:
        """Full regression vector; fixed mode pins the angle logits at zero."""
        if not self.fixed:
            return params
        return np.concatenate([params, np.zeros(self.decoder.k)])

    def reduce(self, grad: np.ndarray) -> np.ndarray:
        return grad[: 2 + self.decoder.k] if self.fixed else grad


def prepare(target: CartesianPolygon, cfg: FitConfig) -> FitProblem:
    center, w, h = bbox(target)
    origin = target_origin(target, cfg.origin_mode)
    o, profile = encode_ground_truth(target, cfg.m, cfg.phase, origin=origin)
    mu = cfg.mu if cfg.mu is not None else 0.25 * (w + h)
    cell = GridCell(center.x - w / 2, center.y - h / 2, w, h)
    mode = "cumsum" if cfg.angle_mode == "fixed" else cfg.angle_mode
    return FitProblem(Target(o, profile, w, h), cell, DecoderConfig(cfg.k, mu, mode), cfg.angle_mode == "fixed")


def fit(target: CartesianPolygon, cfg: FitConfig = FitConfig()) -> tuple[PolarPolygon, FitTrace]:
    """Deform an initial regular polygon onto ``target``.

    Iteration ``i`` (1-based) records the loss of the parameters after
    ``i - 1`` updates, so iteration 1 is the initial polygon. Stops after
    ``max_iters`` records, or earlier once the best loss improved by less
    than ``convergence_tol`` over the last 20 iterations (0 disables).
    """
    prob = prepare(target, cfg)
    rng = np.random.default_rng(cfg.seed)
    params = np.zeros(cfg.n_params)
    if cfg.init_noise > 0:
        params = params + rng.normal(0.0, cfg.init_noise, cfg.n_params)
    trace = FitTrace(n_params=cfg.n_params)
    state = AdamState.zeros(cfg.n_params)
    snaps = set(cfg.snapshot_iters)
    best = []
    for it in range(1, cfg.max_iters + 1):
        f = prob.expand(params)
        try:
            res = evaluate_with_grad(
                f, prob.cell, prob.decoder, prob.target, cfg.weights, cfg.circular_smoothness
            )
        except (FloatingPointError, GeometryError) as exc:
            raise FitDivergence(f"iteration {it}: {exc}") from exc
        trace.records.append(IterRecord(it, res.breakdown))
        if res.flagged:
            trace.flagged_iters.append(it)
        if it in snaps:
            trace.snapshots[it] = decode(f, prob.cell, prob.decoder)
        best.append(min(res.value, best[-1]) if best else res.value)
        if cfg.convergence_tol > 0 and it > 20 and best[-21] - best[-1] < cfg.convergence_tol:
            trace.converged = True
            log.debug("converged at iteration %d", it)
            break
        if it == cfg.max_iters:
            break
        g = prob.reduce(res.grad)
        lr = cfg.lr_at(it)
        if cfg.optimizer == "adam":
            params, state = adam_step(params, g, state, lr)
        else:
            params = sgd_step(params, g, lr)
        if not np.all(np.isfinite(params)):
            raise FitDivergence(f"iteration {it}: parameters became non-finite")
    final = decode(prob.expand(params), prob.cell, prob.decoder)
    return final, trace
