"""Differentiable polar-polygon geometry: decoding, dense resampling, losses and fitting."""

from .codec import DecoderConfig, GridCell, decode, encode_ground_truth
from .evaluate import evaluate, hungarian_assign, polygon_iou
from .fit import FitConfig, FitTrace, adam_step, fit
from .geometry import (
    CartesianPolygon,
    GeometryError,
    PolarPolygon,
    PolarVertex,
    Point,
    bbox_center,
    geometric_centroid,
    point_in_polygon,
    signed_area,
    to_cartesian,
    to_polar,
    vertex_mean,
)
from .gradients import Target, grad_regression_loss
from .losses import LossBreakdown, LossWeights, origin_loss, polar_iou_loss, regression_loss, smooth_l1, smoothness_loss
from .resample import (
    DenseRadialProfile,
    RaySegmentHit,
    ray_segment_intersect,
    resample_batch,
    resample_oracle,
    resample_triangle,
    resample_vector,
)

__version__ = "0.1.0"
